#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsrc {

/// One experiment outcome: a (case, N, policy, source) point of a sweep.
/// CSV column order matches the field order here; `pdr_ci` is empty for
/// analytic rows. `error` is non-empty when the point failed and the numeric
/// fields are then meaningless.
struct ResultRow {
    std::string case_id;
    int n_vehicles = 0;
    std::string policy;  ///< "dot11p", "dot11p_cw128", "spcdc", ...
    std::string source;  ///< "analytic" | "simulation"
    double pdr = 0.0;
    std::optional<double> pdr_ci;  ///< 99% half-width, simulation rows only
    double mean_delay_s = 0.0;
    double mean_reception_delay_s = 0.0;
    double contention_density = 0.0;
    std::uint64_t overload_drops = 0;
    double runtime_s = 0.0;
    std::uint64_t seed = 0;
    std::string error;
};

extern const char* const kResultCsvHeader;

std::string result_row_to_csv(const ResultRow& row);
ResultRow result_row_from_csv(const std::string& line);

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& path);
void write_results_json(const std::string& path, const std::vector<ResultRow>& rows);

}  // namespace dsrc
