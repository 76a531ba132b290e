#include "dsrc/mac_spcdc.hpp"

#include <cassert>
#include <cmath>

namespace dsrc {

namespace {
constexpr int kNoOmega = 2;  // sentinel outside {-1,0,1}
}

SpcdcPolicy::SpcdcPolicy(const ScenarioParams& p, std::vector<BackoffDraw>* draw_log,
                         bool oracle_density)
    : lambda_(p.lambda),
      inv_lambda_(1.0 / p.lambda),
      slot_(p.slot),
      c_mult_(p.spcdc_c),
      period_(p.spcdc_period),
      n_(p.n_vehicles),
      oracle_(oracle_density),
      log_(draw_log),
      phase_(static_cast<std::size_t>(n_), std::numeric_limits<double>::quiet_NaN()),
      heard_gen_(static_cast<std::size_t>(n_), -std::numeric_limits<double>::infinity()),
      anchor_(static_cast<std::size_t>(n_), 0.0),
      period_idx_(static_cast<std::size_t>(n_), -1),
      pending_omega_(static_cast<std::size_t>(n_), kNoOmega) {}

int SpcdcPolicy::contenders(int vehicle, std::int64_t slot) const {
    // A neighbor contends when its newest packet generated in a slot window
    // up to and including ours has not been decoded yet. Same-window arrivals
    // count each other: counting runs on the slot grid, not on instants.
    const double window_end = static_cast<double>(slot + 1) * slot_;
    int count = 0;
    for (int j = 0; j < n_; ++j) {
        if (j == vehicle) continue;
        const double ph = phase_[static_cast<std::size_t>(j)];
        if (std::isnan(ph)) continue;
        double k = std::floor((window_end - ph) / inv_lambda_);
        double g = ph + k * inv_lambda_;
        if (g >= window_end) {  // boundary rounding pushed us one cycle ahead
            k -= 1.0;
            g = ph + k * inv_lambda_;
        }
        if (k < 0.0) continue;  // nothing generated yet
        if (heard_gen_[static_cast<std::size_t>(j)] < g - 0.5 * inv_lambda_) ++count;
    }
    return count;
}

int SpcdcPolicy::known_neighbors(int vehicle) const {
    int known = 0;
    for (int j = 0; j < n_; ++j) {
        if (j != vehicle && !std::isnan(phase_[static_cast<std::size_t>(j)])) ++known;
    }
    return known;
}

MacDecision SpcdcPolicy::on_arrival(int vehicle, const ArrivalContext& ctx, SplitMix64& rng) {
    const auto v = static_cast<std::size_t>(vehicle);
    const int others = oracle_ ? ctx.oracle_contenders : contenders(vehicle, ctx.slot);
    std::int64_t b = static_cast<std::int64_t>(
        std::llround(c_mult_ * static_cast<double>(others + 1)));  // own packet included

    if (period_idx_[v] < 0) anchor_[v] = ctx.time;
    const auto pid = static_cast<std::int64_t>(std::floor((ctx.time - anchor_[v]) / period_));
    if (pid != period_idx_[v]) {
        period_idx_[v] = pid;
        pending_omega_[v] = static_cast<int>(rng.below(3)) - 1;
    }
    if (pending_omega_[v] != kNoOmega) {
        b += pending_omega_[v];
        pending_omega_[v] = kNoOmega;  // only the first packet of the period
        if (b < 0) b = 0;
    }
    if (log_) log_->push_back({vehicle, ctx.time, b});
    return {false, b};
}

std::int64_t SpcdcPolicy::on_defer(int, double, SplitMix64&) {
    assert(false && "spcdc never senses, so never defers");
    return 0;
}

void SpcdcPolicy::on_delivered(int owner, double gen_time, double phase) {
    const auto o = static_cast<std::size_t>(owner);
    phase_[o] = phase;
    if (gen_time > heard_gen_[o]) heard_gen_[o] = gen_time;
}

}  // namespace dsrc
