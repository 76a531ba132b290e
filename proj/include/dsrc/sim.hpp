#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsrc/mac_policy.hpp"
#include "dsrc/scenario.hpp"
#include "dsrc/stats.hpp"

namespace dsrc {

/// Test instrumentation for the engine. Production runs leave all defaults.
struct SimHooks {
    /// Per-vehicle generation phases; empty draws Uniform[0, 1/lambda) per vehicle.
    std::vector<double> forced_phases;
    /// Channel held busy by an unattributed transmission for slots [0, n).
    std::int64_t initial_busy_slots = 0;
    /// SpCDC counts contenders from engine truth instead of decoded timelines.
    bool oracle_density = false;
    bool log_backoff_draws = false;
};

enum class PacketOutcome : std::uint8_t { delivered, collided };

struct PacketRecord {
    int vehicle = 0;
    double gen_time = 0.0;
    double tx_start = 0.0;
    PacketOutcome outcome = PacketOutcome::delivered;
    double access_delay = 0.0;
    double service_time = 0.0;  ///< access_delay + t_tr, delivered and collided alike
};

/// One replication's aggregates over the measurement window (packets counted
/// by generation time >= warmup).
struct RepMetrics {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t collided = 0;
    std::uint64_t overload_drops = 0;  ///< packet replaced in buffer by its successor
    std::uint64_t inflight_end = 0;    ///< generated but not transmitted at sim end
    double sum_access = 0.0;
    double sum_service = 0.0;
    double sum_reception = 0.0;
    std::uint64_t reception_samples = 0;
    double density_integral = 0.0;  ///< vehicle-seconds holding a generated-but-unsent packet
    double measured_time = 0.0;
    /// Counter-chain cross-check: idle-slot observations of armed vehicles and
    /// boundary fires out of backoff.
    std::uint64_t backoff_slots_observed = 0;
    std::uint64_t backoff_fires = 0;

    double pdr() const {
        const std::uint64_t d = delivered + collided;
        return d ? static_cast<double>(delivered) / static_cast<double>(d) : 1.0;
    }
    double mean_access() const {
        const std::uint64_t d = delivered + collided;
        return d ? sum_access / static_cast<double>(d) : 0.0;
    }
    double mean_service() const {
        const std::uint64_t d = delivered + collided;
        return d ? sum_service / static_cast<double>(d) : 0.0;
    }
    double mean_reception() const {
        return reception_samples ? sum_reception / static_cast<double>(reception_samples) : 0.0;
    }
    double mean_density() const {
        return measured_time > 0 ? density_integral / measured_time : 0.0;
    }
};

struct SimResult {
    RepMetrics metrics;
    std::vector<PacketRecord> trace;  ///< all packets; filled only when requested
    std::vector<BackoffDraw> draws;   ///< only with hooks.log_backoff_draws
};

/// Replication-merged metrics. Identical inputs give bit-identical output;
/// merge order is fixed by replication index regardless of scheduling.
struct SimMetrics {
    Estimate pdr, service, access, reception, density;
    std::uint64_t generated = 0, delivered = 0, collided = 0, overload_drops = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<RepMetrics> reps;
};

/// Runs one seeded replication of the slot-level broadcast channel.
SimResult run_replication(const ScenarioParams& p, MacId mac, double duration_s,
                          double warmup_s, std::uint64_t seed, bool collect_trace = false,
                          const SimHooks& hooks = {});

/// Runs `replications` independent replications (replication r is seeded with
/// seed ^ r) on a bounded worker pool and merges the per-replication
/// aggregates in index order. threads = 0 picks the hardware count.
SimMetrics run_simulation(const ScenarioParams& p, MacId mac, double duration_s,
                          double warmup_s, std::uint64_t seed, int replications,
                          const SimHooks& hooks = {}, int threads = 0);

/// Empirical reception delay over a trace: a delivered packet preceded by f
/// consecutive collided packets of the same vehicle contributes
/// f/lambda + its service time; trailing unresolved runs are discarded.
double reception_delay_mean(const std::vector<PacketRecord>& trace, double lambda);

void write_trace_csv(const std::string& path, const std::vector<PacketRecord>& trace);

}  // namespace dsrc
