#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dsrc/rng.hpp"
#include "dsrc/scenario.hpp"

namespace dsrc {

enum class MacId { dot11p, spcdc };

/// Parses "dot11p" / "spcdc"; throws InvalidParams("policy") otherwise.
MacId mac_from_string(const std::string& s);
std::string to_string(MacId id);

/// One logged counter decision (DCF backoff draw, or the final SpCDC counter).
struct BackoffDraw {
    int vehicle = 0;
    double time = 0.0;
    std::int64_t value = 0;
};

/// What the engine tells a policy about a freshly generated packet.
struct ArrivalContext {
    double time = 0.0;           ///< generation instant, s
    std::int64_t slot = 0;       ///< slot containing `time`
    bool channel_busy = false;   ///< a transmission covers this instant
    int oracle_contenders = 0;   ///< true pending-packet count from the engine (debug aid)
};

struct MacDecision {
    /// DCF case 1: sense for a DIFS and transmit if the channel stays idle.
    /// Only returned when the channel is idle at arrival.
    bool sense_first = false;
    /// Idle slots to count down otherwise.
    std::int64_t backoff = 0;
};

/// Per-replication MAC behavior. The engine owns the clock, the channel and
/// all countdown bookkeeping; a policy only picks counters and digests
/// received packets. One instance serves every vehicle of a replication.
class MacPolicy {
public:
    virtual ~MacPolicy() = default;

    virtual MacDecision on_arrival(int vehicle, const ArrivalContext& ctx, SplitMix64& rng) = 0;

    /// The initial DIFS sense was interrupted by a transmission: pick the
    /// backoff counter for the deferred packet (DCF case 2).
    virtual std::int64_t on_defer(int vehicle, double time, SplitMix64& rng) = 0;

    /// A packet was decoded by every listener (broadcast, perfect PHY).
    virtual void on_delivered(int owner, double gen_time, double phase) = 0;

    /// Idle slots the channel must stay clear before a countdown (re)starts.
    virtual std::int64_t rearm_slots() const = 0;

    /// Whether fresh arrivals on an idle channel sense-then-transmit instead
    /// of drawing a counter.
    virtual bool immediate_on_idle() const = 0;
};

std::unique_ptr<MacPolicy> make_policy(MacId id, const ScenarioParams& p,
                                       std::vector<BackoffDraw>* draw_log,
                                       bool oracle_density);

}  // namespace dsrc
