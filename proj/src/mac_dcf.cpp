#include "dsrc/mac_dcf.hpp"

#include <cmath>

#include "dsrc/errors.hpp"
#include "dsrc/mac_spcdc.hpp"

namespace dsrc {

MacId mac_from_string(const std::string& s) {
    if (s == "dot11p") return MacId::dot11p;
    if (s == "spcdc") return MacId::spcdc;
    throw InvalidParams("policy", "unknown MAC policy '" + s + "' (expected dot11p or spcdc)");
}

std::string to_string(MacId id) {
    return id == MacId::dot11p ? "dot11p" : "spcdc";
}

DcfPolicy::DcfPolicy(const ScenarioParams& p, std::vector<BackoffDraw>* draw_log)
    : cw_(p.cw), difs_slots_(static_cast<std::int64_t>(std::llround(p.difs / p.slot))),
      log_(draw_log) {}

std::int64_t DcfPolicy::draw(int vehicle, double time, SplitMix64& rng) {
    const auto value = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cw_)));
    if (log_) log_->push_back({vehicle, time, value});
    return value;
}

MacDecision DcfPolicy::on_arrival(int vehicle, const ArrivalContext& ctx, SplitMix64& rng) {
    if (!ctx.channel_busy) return {true, 0};
    return {false, draw(vehicle, ctx.time, rng)};
}

std::int64_t DcfPolicy::on_defer(int vehicle, double time, SplitMix64& rng) {
    return draw(vehicle, time, rng);
}

std::unique_ptr<MacPolicy> make_policy(MacId id, const ScenarioParams& p,
                                       std::vector<BackoffDraw>* draw_log,
                                       bool oracle_density) {
    if (id == MacId::dot11p) return std::make_unique<DcfPolicy>(p, draw_log);
    return std::make_unique<SpcdcPolicy>(p, draw_log, oracle_density);
}

}  // namespace dsrc
