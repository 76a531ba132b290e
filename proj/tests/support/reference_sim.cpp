#include "reference_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dsrc/errors.hpp"

namespace dsrc_test {

using namespace dsrc;

namespace {

enum class Stage : int { idle, sensing, backoff };

struct RVeh {
    Stage stage = Stage::idle;
    bool has_packet = false;
    double phase = 0.0;
    double gen_time = 0.0;
    std::int64_t gen_idx = 0;
    double deadline = 0.0;
    std::int64_t counter = 0;
    std::int64_t difs_left = 0;
    double next_arrival = 0.0;
    bool arrival_pending = false;
};

struct State {
    ScenarioParams p;
    DerivedTiming tm;
    double sigma, inv_lambda, duration, warmup;
    std::int64_t slots_total, tx_slots, rearm;
    bool collect_trace;
    bool oracle;
    SplitMix64 rng;
    std::unique_ptr<MacPolicy> policy;
    std::vector<RVeh> veh;

    std::int64_t busy_until = 0;
    bool active = false;
    bool active_collided = false;
    struct Pkt {
        int owner;
        double gen;
        double phase;
    };
    std::vector<Pkt> active_pkts;

    RepMetrics m;
    std::vector<PacketRecord> trace;
    std::vector<BackoffDraw> draws;
    std::vector<std::int64_t> run;
    int contending = 0;
    double last_density_t = 0.0;

    explicit State(std::uint64_t seed) : rng(seed) {}

    std::int64_t slot_of(double t) const {
        return static_cast<std::int64_t>(std::floor(t / sigma));
    }

    void density_delta(int d, double t) {
        const double lo = std::max(last_density_t, warmup);
        const double hi = std::min(t, duration);
        if (hi > lo) m.density_integral += static_cast<double>(contending) * (hi - lo);
        last_density_t = t;
        contending += d;
    }

    void record_packet(int v, double gen, double tx, bool collided, double access,
                       double service) {
        if (gen >= warmup) {
            if (collided) {
                ++m.collided;
                ++run[static_cast<std::size_t>(v)];
            } else {
                ++m.delivered;
                m.sum_reception +=
                    static_cast<double>(run[static_cast<std::size_t>(v)]) * inv_lambda + service;
                ++m.reception_samples;
                run[static_cast<std::size_t>(v)] = 0;
            }
            m.sum_access += access;
            m.sum_service += service;
        }
        if (collect_trace) {
            trace.push_back({v, gen, tx,
                             collided ? PacketOutcome::collided : PacketOutcome::delivered,
                             access, service});
        }
    }

    int oracle_count(int self) const {
        int c = 0;
        for (int j = 0; j < p.n_vehicles; ++j) {
            if (j != self && veh[static_cast<std::size_t>(j)].has_packet) ++c;
        }
        if (active) {
            for (const auto& pk : active_pkts) {
                if (pk.owner != self) ++c;
            }
        }
        return c;
    }

    void tx_start(std::int64_t s, double t, std::vector<int> starters) {
        std::sort(starters.begin(), starters.end());
        busy_until = s + tx_slots;
        const bool collided = starters.size() >= 2;
        active = true;
        active_collided = collided;
        active_pkts.clear();
        for (const int v : starters) {
            auto& rv = veh[static_cast<std::size_t>(v)];
            if (rv.stage == Stage::backoff) {
                ++m.backoff_fires;
                ++m.backoff_slots_observed;  // the zero-state visit
            }
            const double access = t - rv.gen_time;
            const double service = access + tm.t_tr;
            record_packet(v, rv.gen_time, t, collided, access, service);
            active_pkts.push_back({v, rv.gen_time, rv.phase});
            density_delta(-1, t);
            rv.has_packet = false;
            rv.stage = Stage::idle;
        }
        // every outstanding DIFS sense is interrupted; id order fixes the draws
        for (int v = 0; v < p.n_vehicles; ++v) {
            auto& rv = veh[static_cast<std::size_t>(v)];
            if (rv.stage == Stage::sensing && rv.deadline > t) {
                rv.stage = Stage::backoff;
                rv.counter = std::max<std::int64_t>(policy->on_defer(v, t, rng), 0);
                rv.difs_left = rearm;
            }
        }
    }

    void complete_tx() {
        if (!active_collided && active_pkts.size() == 1) {
            const auto& pk = active_pkts.front();
            policy->on_delivered(pk.owner, pk.gen, pk.phase);
        }
        active = false;
    }

    void handle_arrival(int v, double t, std::int64_t s) {
        auto& rv = veh[static_cast<std::size_t>(v)];
        rv.gen_idx += 1;
        rv.next_arrival = rv.phase + static_cast<double>(rv.gen_idx) * inv_lambda;
        rv.arrival_pending = rv.next_arrival < duration;

        if (rv.has_packet) {
            if (rv.gen_time >= warmup) ++m.overload_drops;
            density_delta(-1, t);
            rv.stage = Stage::idle;
        }
        if (t >= warmup) ++m.generated;
        rv.has_packet = true;
        rv.gen_time = t;
        density_delta(+1, t);

        ArrivalContext ctx;
        ctx.time = t;
        ctx.slot = s;
        ctx.channel_busy = busy_until > s;
        if (oracle) ctx.oracle_contenders = oracle_count(v);
        const MacDecision d = policy->on_arrival(v, ctx, rng);
        if (d.sense_first) {
            rv.stage = Stage::sensing;
            rv.deadline = t + p.difs;
        } else if (ctx.channel_busy) {
            rv.stage = Stage::backoff;
            rv.counter = std::max<std::int64_t>(d.backoff, 0);
            rv.difs_left = rearm;
        } else {
            // an idle-channel arrival cannot fire before the next boundary
            rv.stage = Stage::backoff;
            rv.counter = std::max<std::int64_t>(d.backoff, 1);
            rv.difs_left = 0;
        }
    }
};

}  // namespace

SimResult reference_run_replication(const ScenarioParams& p, MacId mac, double duration_s,
                                    double warmup_s, std::uint64_t seed, bool collect_trace,
                                    const SimHooks& hooks) {
    validate(p);
    if (!(duration_s > warmup_s) || warmup_s < 0) {
        throw InvalidParams("sim_duration", "need sim_duration > warmup >= 0");
    }
    State st(seed);
    st.p = p;
    st.tm = derive_timing(p);
    st.sigma = p.slot;
    st.inv_lambda = 1.0 / p.lambda;
    st.duration = duration_s;
    st.warmup = warmup_s;
    st.slots_total = static_cast<std::int64_t>(std::ceil(duration_s / p.slot));
    st.tx_slots = st.tm.slots_per_tx;
    st.collect_trace = collect_trace;
    st.oracle = hooks.oracle_density;
    st.policy =
        make_policy(mac, p, hooks.log_backoff_draws ? &st.draws : nullptr, hooks.oracle_density);
    st.rearm = st.policy->rearm_slots();
    st.veh.resize(static_cast<std::size_t>(p.n_vehicles));
    st.run.assign(static_cast<std::size_t>(p.n_vehicles), 0);
    if (!hooks.forced_phases.empty() &&
        hooks.forced_phases.size() != static_cast<std::size_t>(p.n_vehicles)) {
        throw InvalidParams("forced_phases", "forced_phases must list one phase per vehicle");
    }
    for (int v = 0; v < p.n_vehicles; ++v) {
        auto& rv = st.veh[static_cast<std::size_t>(v)];
        rv.phase = hooks.forced_phases.empty()
                       ? st.rng.uniform01() * st.inv_lambda
                       : hooks.forced_phases[static_cast<std::size_t>(v)];
        rv.next_arrival = rv.phase;
        rv.arrival_pending = rv.phase < duration_s;
    }
    if (hooks.initial_busy_slots > 0) st.busy_until = hooks.initial_busy_slots;

    for (std::int64_t s = 0; s < st.slots_total; ++s) {
        // transmission that ends at this boundary
        if (st.busy_until == s && st.active) st.complete_tx();

        // boundary transmissions: expired countdowns plus senses landing
        // exactly on the boundary
        if (st.busy_until <= s) {
            const double boundary = static_cast<double>(s) * st.sigma;
            std::vector<int> starters;
            for (int v = 0; v < p.n_vehicles; ++v) {
                const auto& rv = st.veh[static_cast<std::size_t>(v)];
                if (rv.stage == Stage::backoff && rv.difs_left == 0 && rv.counter == 0) {
                    starters.push_back(v);
                } else if (rv.stage == Stage::sensing && rv.deadline == boundary) {
                    starters.push_back(v);
                }
            }
            if (!starters.empty()) st.tx_start(s, boundary, starters);
        }

        // timed events inside the slot, chronological; transmission starts
        // win ties against arrivals
        for (;;) {
            double best_t = std::numeric_limits<double>::infinity();
            int best_kind = 2;  // 0 = sense, 1 = arrival, 2 = none
            int best_v = -1;
            auto better = [&](double t, int kind, int v) {
                if (t != best_t) return t < best_t;
                if (kind != best_kind) return kind < best_kind;
                return v < best_v;
            };
            for (int v = 0; v < p.n_vehicles; ++v) {
                const auto& rv = st.veh[static_cast<std::size_t>(v)];
                if (rv.stage == Stage::sensing && st.slot_of(rv.deadline) <= s &&
                    better(rv.deadline, 0, v)) {
                    best_t = rv.deadline;
                    best_kind = 0;
                    best_v = v;
                }
                if (rv.arrival_pending && st.slot_of(rv.next_arrival) <= s &&
                    better(rv.next_arrival, 1, v)) {
                    best_t = rv.next_arrival;
                    best_kind = 1;
                    best_v = v;
                }
            }
            if (best_v < 0) break;
            if (best_kind == 0) {
                // all senses due at exactly this instant fire together
                std::vector<int> group;
                for (int v = 0; v < p.n_vehicles; ++v) {
                    const auto& rv = st.veh[static_cast<std::size_t>(v)];
                    if (rv.stage == Stage::sensing && rv.deadline == best_t) group.push_back(v);
                }
                st.tx_start(s, best_t, group);
            } else {
                st.handle_arrival(best_v, best_t, s);
            }
        }

        // end of slot: countdown bookkeeping
        const bool busy_overlap = st.busy_until > s;
        for (int v = 0; v < p.n_vehicles; ++v) {
            auto& rv = st.veh[static_cast<std::size_t>(v)];
            if (rv.stage != Stage::backoff) continue;
            if (busy_overlap) {
                rv.difs_left = st.rearm;  // interrupted: full DIFS before resuming
            } else if (rv.difs_left > 0) {
                --rv.difs_left;
            } else if (rv.counter > 0) {
                --rv.counter;
                ++st.m.backoff_slots_observed;
            }
        }
    }

    st.density_delta(0, duration_s);
    st.m.measured_time = duration_s - warmup_s;
    for (const auto& rv : st.veh) {
        if (rv.has_packet && rv.gen_time >= warmup_s) ++st.m.inflight_end;
    }

    SimResult out;
    out.metrics = st.m;
    out.trace = std::move(st.trace);
    out.draws = std::move(st.draws);
    return out;
}

}  // namespace dsrc_test
