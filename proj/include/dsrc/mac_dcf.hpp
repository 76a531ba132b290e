#pragma once

#include "dsrc/mac_policy.hpp"

namespace dsrc {

/// 802.11p broadcast DCF. Arrival on an idle channel senses for a DIFS and
/// transmits if nothing intervenes; otherwise the packet draws a counter
/// uniformly from {0..CW-1} and counts down idle slots, re-arming a full DIFS
/// after every interruption. No retransmission, no CW doubling (broadcast).
class DcfPolicy : public MacPolicy {
public:
    DcfPolicy(const ScenarioParams& p, std::vector<BackoffDraw>* draw_log);

    MacDecision on_arrival(int vehicle, const ArrivalContext& ctx, SplitMix64& rng) override;
    std::int64_t on_defer(int vehicle, double time, SplitMix64& rng) override;
    void on_delivered(int, double, double) override {}
    std::int64_t rearm_slots() const override { return difs_slots_; }
    bool immediate_on_idle() const override { return true; }

private:
    std::int64_t draw(int vehicle, double time, SplitMix64& rng);

    int cw_;
    std::int64_t difs_slots_;
    std::vector<BackoffDraw>* log_;
};

}  // namespace dsrc
