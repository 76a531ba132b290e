#pragma once

#include <limits>

#include "dsrc/mac_policy.hpp"

namespace dsrc {

/// Semi-persistent contention density control. Each vehicle learns the
/// generation phases of its neighbors from decoded packets, counts how many
/// of their packets are pending but unheard when its own packet arrives, and
/// sets the backoff counter to C times that count (own packet included).
/// The first packet of every semi-persistent period is perturbed by
/// omega in {-1,0,1}, drawn once per period.
///
/// Under full connectivity and a perfect PHY every vehicle decodes exactly
/// the same transmissions, so one shared timeline is observationally
/// identical to per-vehicle copies; vehicles still never read their own entry.
class SpcdcPolicy : public MacPolicy {
public:
    SpcdcPolicy(const ScenarioParams& p, std::vector<BackoffDraw>* draw_log,
                bool oracle_density);

    MacDecision on_arrival(int vehicle, const ArrivalContext& ctx, SplitMix64& rng) override;
    std::int64_t on_defer(int vehicle, double time, SplitMix64& rng) override;
    void on_delivered(int owner, double gen_time, double phase) override;
    std::int64_t rearm_slots() const override { return 0; }
    bool immediate_on_idle() const override { return false; }

    /// Pending-but-unheard neighbor packets with generation slot <= `slot`,
    /// as seen by `vehicle`. Exposed for tests.
    int contenders(int vehicle, std::int64_t slot) const;
    /// Neighbors whose generation phase is known to `vehicle`.
    int known_neighbors(int vehicle) const;

private:
    double lambda_, inv_lambda_, slot_, c_mult_, period_;
    int n_;
    bool oracle_;
    std::vector<BackoffDraw>* log_;

    std::vector<double> phase_;       ///< NaN until the first decoded packet
    std::vector<double> heard_gen_;   ///< newest decoded generation time per vehicle
    std::vector<double> anchor_;      ///< own period clock origin (first generation)
    std::vector<std::int64_t> period_idx_;
    std::vector<int> pending_omega_;  ///< unused sentinel = 2
};

}  // namespace dsrc
