#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsrc/results.hpp"
#include "dsrc/scenario.hpp"
#include "dsrc/mac_policy.hpp"

namespace dsrc {

/// One (data_rate, lambda, payload) combination, i.e. one curve family.
struct CaseSpec {
    double data_rate = 6e6;
    double lambda = 10.0;
    double payload_bytes = 200.0;
    std::string id;  ///< derived from the values when empty
};

/// A MAC under test; `cw` overrides the scenario contention window so the
/// same sweep can carry dot11p variants side by side.
struct PolicySpec {
    MacId mac = MacId::dot11p;
    std::optional<int> cw;
    std::string id;
};

struct SweepSpec {
    ScenarioParams base;
    std::string sweep_key = "n_vehicles";
    std::vector<double> values;
    std::vector<CaseSpec> cases;      ///< empty = single case taken from base
    std::vector<PolicySpec> policies; ///< at least one required
    bool run_analytic = true;
    bool run_simulation = true;
    int replications = 20;
    double sim_duration = 100.0;
    double warmup = 2.0;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int threads = 0;  ///< 0 = hardware concurrency
};

/// "dot11p", "spcdc", or "dot11p:cw=128"-style override tokens.
PolicySpec parse_policy(const std::string& token);

/// Sets a swept parameter by name; integer-valued fields are rounded.
void apply_sweep_value(ScenarioParams& p, const std::string& key, double value);

std::string case_label(const CaseSpec& c);

/// The standard measurement grid: three (rate, lambda, payload) cases over
/// N = 10..200 vehicles, dot11p (CW 16 and 128) and spcdc, 20 x 100 s
/// replications with a 2 s warmup.
SweepSpec default_table_sweep();

/// Builds a sweep from scenario-file keys (sweep_key, sweep_values, cases,
/// policies, replications, sim_duration, warmup, seed, tol) on top of the
/// scenario parameters in the same file.
SweepSpec sweep_from_kv(const KeyValues& kv);

/// Runs every (case x value x policy x source) point. Rows are computed on a
/// bounded worker pool, appended to `partial_csv_path` as they finish (when
/// non-empty), and returned sorted by (case, N, policy, source). Per-row
/// failures land in the row's `error` column; the sweep continues.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const std::string& partial_csv_path = "");

}  // namespace dsrc
