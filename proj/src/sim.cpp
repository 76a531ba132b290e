#include "dsrc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <thread>

#include "dsrc/errors.hpp"

namespace dsrc {

namespace {

// Slot-level broadcast channel. The clock is the sigma grid; transmissions
// occupy slots_per_tx consecutive slots and backoff counters advance only on
// fully idle slots. Intra-slot event order is resolved by the continuous
// event times: a transmission that starts earlier within a slot is sensed by
// everything that happens later in that slot, so only simultaneous starts
// (same instant, in practice the same slot boundary) can collide.
//
// The loop jumps straight to the next slot holding an event; slots in
// between are idle by construction and all countdown arithmetic over them is
// implicit in the stored fire slots.
class Engine {
public:
    Engine(const ScenarioParams& p, MacId mac, double duration_s, double warmup_s,
           std::uint64_t seed, bool collect_trace, const SimHooks& hooks)
        : p_(p),
          tm_(derive_timing(p)),
          sigma_(p.slot),
          inv_lambda_(1.0 / p.lambda),
          duration_(duration_s),
          warmup_(warmup_s),
          collect_trace_(collect_trace),
          oracle_mode_(hooks.oracle_density),
          rng_(seed) {
        if (!(duration_s > warmup_s) || warmup_s < 0) {
            throw InvalidParams("sim_duration", "need sim_duration > warmup >= 0");
        }
        slots_total_ = static_cast<std::int64_t>(std::ceil(duration_ / sigma_));
        tx_slots_ = tm_.slots_per_tx;
        policy_ = make_policy(mac, p, hooks.log_backoff_draws ? &draws_ : nullptr,
                              hooks.oracle_density);
        rearm_slots_ = policy_->rearm_slots();
        difs_time_ = p.difs;

        const int n = p.n_vehicles;
        veh_.resize(static_cast<std::size_t>(n));
        collided_run_.assign(static_cast<std::size_t>(n), 0);
        if (!hooks.forced_phases.empty() &&
            hooks.forced_phases.size() != static_cast<std::size_t>(n)) {
            throw InvalidParams("forced_phases", "forced_phases must list one phase per vehicle");
        }
        for (int v = 0; v < n; ++v) {
            auto& veh = veh_[static_cast<std::size_t>(v)];
            veh.phase = hooks.forced_phases.empty() ? rng_.uniform01() * inv_lambda_
                                                    : hooks.forced_phases[static_cast<std::size_t>(v)];
            if (veh.phase < duration_) arrivals_.push({veh.phase, v});
        }
        if (hooks.initial_busy_slots > 0) {
            busy_until_ = hooks.initial_busy_slots;
            busy_end_slot_ = hooks.initial_busy_slots;
        }
    }

    SimResult run() {
        for (;;) {
            const std::int64_t s = next_event_slot();
            if (s >= slots_total_) break;
            process_slot(s);
        }
        finalize();
        SimResult out;
        out.metrics = m_;
        out.trace = std::move(trace_);
        out.draws = std::move(draws_);
        return out;
    }

private:
    enum class VState : std::uint8_t { idle, sensing, waiting, armed };

    struct Vehicle {
        VState state = VState::idle;
        bool has_packet = false;
        double phase = 0.0;
        double gen_time = 0.0;
        std::int64_t gen_index = 0;
        double sense_deadline = 0.0;
        std::int64_t counter = 0;          // waiting: idle slots still owed
        std::int64_t fire_slot = 0;        // armed
        std::int64_t countdown_start = 0;  // armed: first slot that counts
        std::uint32_t epoch = 0;
    };

    struct ArrivalEv {
        double time;
        int vehicle;
    };
    struct ArrivalCmp {
        bool operator()(const ArrivalEv& a, const ArrivalEv& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.vehicle > b.vehicle;
        }
    };
    struct SenseEv {
        double time;
        int vehicle;
        std::uint32_t epoch;
    };
    struct SenseCmp {
        bool operator()(const SenseEv& a, const SenseEv& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.vehicle > b.vehicle;
        }
    };
    struct FireEv {
        std::int64_t slot;
        int vehicle;
        std::uint32_t epoch;
    };
    struct FireCmp {
        bool operator()(const FireEv& a, const FireEv& b) const {
            if (a.slot != b.slot) return a.slot > b.slot;
            return a.vehicle > b.vehicle;
        }
    };
    struct Ref {
        int vehicle;
        std::uint32_t epoch;
        bool operator<(const Ref& o) const {
            return vehicle < o.vehicle || (vehicle == o.vehicle && epoch < o.epoch);
        }
    };
    struct TxPacket {
        int owner;
        double gen_time;
        double phase;
    };

    std::int64_t slot_of(double t) const {
        return static_cast<std::int64_t>(std::floor(t / sigma_));
    }

    void purge_fires() {
        while (!fires_.empty()) {
            const auto& top = fires_.top();
            const auto& veh = veh_[static_cast<std::size_t>(top.vehicle)];
            if (veh.epoch == top.epoch && veh.state == VState::armed &&
                veh.fire_slot == top.slot) {
                break;
            }
            fires_.pop();
        }
    }

    void purge_senses() {
        while (!senses_.empty()) {
            const auto& top = senses_.top();
            const auto& veh = veh_[static_cast<std::size_t>(top.vehicle)];
            if (veh.epoch == top.epoch && veh.state == VState::sensing) break;
            senses_.pop();
        }
    }

    std::int64_t next_event_slot() {
        std::int64_t s = slots_total_;
        if (busy_end_slot_ >= 0) s = std::min(s, busy_end_slot_);
        if (!arrivals_.empty()) s = std::min(s, slot_of(arrivals_.top().time));
        purge_fires();
        if (!fires_.empty()) s = std::min(s, fires_.top().slot);
        purge_senses();
        if (!senses_.empty()) s = std::min(s, slot_of(senses_.top().time));
        return s;
    }

    void process_slot(std::int64_t s) {
        // 1. a busy period ends at this boundary: receptions, then re-arming
        if (busy_end_slot_ == s) {
            busy_end_slot_ = -1;
            if (active_valid_) complete_tx();
            for (const auto& ref : waiting_) {
                auto& veh = veh_[static_cast<std::size_t>(ref.vehicle)];
                if (veh.epoch != ref.epoch || veh.state != VState::waiting) continue;
                arm(ref.vehicle, s + rearm_slots_ + veh.counter, s + rearm_slots_);
            }
            waiting_.clear();
        }

        // 2. boundary transmissions: countdowns that hit zero, plus DIFS
        //    senses whose deadline lands exactly on the boundary
        std::vector<int> starters;
        purge_fires();
        while (!fires_.empty() && fires_.top().slot == s) {
            starters.push_back(fires_.top().vehicle);
            fires_.pop();
            purge_fires();
        }
        const double boundary_time = static_cast<double>(s) * sigma_;
        purge_senses();
        while (!senses_.empty() && senses_.top().time == boundary_time) {
            starters.push_back(senses_.top().vehicle);
            senses_.pop();
            purge_senses();
        }
        if (!starters.empty()) {
            std::sort(starters.begin(), starters.end());
            start_tx(s, boundary_time, starters);
        }

        // 3. timed events inside the slot, in chronological order; ties between
        //    transmission starts and arrivals resolve to the transmission
        for (;;) {
            purge_senses();
            const bool has_sense =
                !senses_.empty() && slot_of(senses_.top().time) <= s;
            const bool has_arrival =
                !arrivals_.empty() && slot_of(arrivals_.top().time) <= s;
            if (!has_sense && !has_arrival) break;
            const double ts =
                has_sense ? senses_.top().time : std::numeric_limits<double>::infinity();
            const double ta =
                has_arrival ? arrivals_.top().time : std::numeric_limits<double>::infinity();
            if (ts <= ta) {
                std::vector<int> group;
                while (!senses_.empty() && senses_.top().time == ts) {
                    group.push_back(senses_.top().vehicle);
                    senses_.pop();
                    purge_senses();
                }
                if (!group.empty()) {
                    assert(busy_until_ <= s && "sense deadline survived into a busy channel");
                    std::sort(group.begin(), group.end());
                    start_tx(s, ts, group);
                }
            } else {
                while (!arrivals_.empty() && arrivals_.top().time == ta) {
                    const int v = arrivals_.top().vehicle;
                    arrivals_.pop();
                    handle_arrival(v, ta, s);
                }
            }
        }
    }

    void handle_arrival(int v, double t, std::int64_t s) {
        auto& veh = veh_[static_cast<std::size_t>(v)];
        veh.gen_index += 1;
        const double next_t = veh.phase + static_cast<double>(veh.gen_index) * inv_lambda_;
        if (next_t < duration_) arrivals_.push({next_t, v});

        if (veh.has_packet) {
            // previous packet never reached the channel: replaced (overload drop)
            if (veh.gen_time >= warmup_) ++m_.overload_drops;
            density_delta(-1, t);
            invalidate(veh);
        }
        if (t >= warmup_) ++m_.generated;
        veh.has_packet = true;
        veh.gen_time = t;
        density_delta(+1, t);

        ArrivalContext ctx;
        ctx.time = t;
        ctx.slot = s;
        ctx.channel_busy = busy_until_ > s;
        if (oracle_mode_) ctx.oracle_contenders = oracle_count(v);
        const MacDecision d = policy_->on_arrival(v, ctx, rng_);
        if (d.sense_first) {
            assert(!ctx.channel_busy);
            veh.state = VState::sensing;
            veh.sense_deadline = t + difs_time_;
            senses_.push({veh.sense_deadline, v, veh.epoch});
            sensing_.push_back({v, veh.epoch});
        } else if (ctx.channel_busy) {
            veh.state = VState::waiting;
            veh.counter = std::max<std::int64_t>(d.backoff, 0);
            waiting_.push_back({v, veh.epoch});
        } else {
            arm(v, s + std::max<std::int64_t>(d.backoff, 1), s);
        }
    }

    void arm(int v, std::int64_t fire, std::int64_t countdown_start) {
        auto& veh = veh_[static_cast<std::size_t>(v)];
        veh.state = VState::armed;
        veh.fire_slot = fire;
        veh.countdown_start = countdown_start;
        fires_.push({fire, v, veh.epoch});
        armed_.push_back({v, veh.epoch});
    }

    void invalidate(Vehicle& veh) {
        ++veh.epoch;
        veh.state = VState::idle;
    }

    void start_tx(std::int64_t s, double t_start, const std::vector<int>& starters) {
        assert(busy_until_ <= s && "transmission started on a busy channel");
        busy_until_ = s + tx_slots_;
        busy_end_slot_ = busy_until_;
        const bool collided = starters.size() >= 2;
        active_valid_ = true;
        active_collided_ = collided;
        active_pkts_.clear();

        for (const int v : starters) {
            auto& veh = veh_[static_cast<std::size_t>(v)];
            if (veh.state == VState::armed) {
                ++m_.backoff_fires;
                m_.backoff_slots_observed +=
                    static_cast<std::uint64_t>(s - veh.countdown_start) + 1;
            }
            const double access = t_start - veh.gen_time;
            const double service = access + tm_.t_tr;
            record_packet(v, veh.gen_time, t_start, collided, access, service);
            active_pkts_.push_back({v, veh.gen_time, veh.phase});
            density_delta(-1, t_start);
            veh.has_packet = false;
            invalidate(veh);
        }

        // freeze running countdowns; the interrupted slot is re-counted later
        for (const auto& ref : armed_) {
            auto& veh = veh_[static_cast<std::size_t>(ref.vehicle)];
            if (veh.epoch != ref.epoch || veh.state != VState::armed) continue;
            if (veh.countdown_start < s) {
                m_.backoff_slots_observed +=
                    static_cast<std::uint64_t>(s - veh.countdown_start);
            }
            veh.counter = veh.fire_slot - std::max(s, veh.countdown_start);
            assert(veh.counter >= 1);
            ++veh.epoch;
            veh.state = VState::waiting;
            waiting_.push_back({ref.vehicle, veh.epoch});
        }
        armed_.clear();

        // a transmission interrupts every DIFS sense still outstanding
        if (!sensing_.empty()) {
            std::sort(sensing_.begin(), sensing_.end());
            for (const auto& ref : sensing_) {
                auto& veh = veh_[static_cast<std::size_t>(ref.vehicle)];
                if (veh.epoch != ref.epoch || veh.state != VState::sensing) continue;
                assert(veh.sense_deadline > t_start);
                const std::int64_t c = policy_->on_defer(ref.vehicle, t_start, rng_);
                ++veh.epoch;
                veh.state = VState::waiting;
                veh.counter = std::max<std::int64_t>(c, 0);
                waiting_.push_back({ref.vehicle, veh.epoch});
            }
            sensing_.clear();
        }
    }

    void complete_tx() {
        if (!active_collided_ && active_pkts_.size() == 1) {
            const auto& pk = active_pkts_.front();
            policy_->on_delivered(pk.owner, pk.gen_time, pk.phase);
        }
        active_valid_ = false;
    }

    void record_packet(int v, double gen, double tx_start, bool collided, double access,
                       double service) {
        if (gen >= warmup_) {
            if (collided) {
                ++m_.collided;
                ++collided_run_[static_cast<std::size_t>(v)];
            } else {
                ++m_.delivered;
                m_.sum_reception +=
                    static_cast<double>(collided_run_[static_cast<std::size_t>(v)]) *
                        inv_lambda_ +
                    service;
                ++m_.reception_samples;
                collided_run_[static_cast<std::size_t>(v)] = 0;
            }
            m_.sum_access += access;
            m_.sum_service += service;
        }
        if (collect_trace_) {
            trace_.push_back({v, gen, tx_start,
                              collided ? PacketOutcome::collided : PacketOutcome::delivered,
                              access, service});
        }
    }

    int oracle_count(int self) const {
        int c = 0;
        for (int j = 0; j < p_.n_vehicles; ++j) {
            if (j != self && veh_[static_cast<std::size_t>(j)].has_packet) ++c;
        }
        if (active_valid_) {
            for (const auto& pk : active_pkts_) {
                if (pk.owner != self) ++c;  // in the air, not yet decodable
            }
        }
        return c;
    }

    void density_delta(int delta, double t) {
        const double lo = std::max(last_density_t_, warmup_);
        const double hi = std::min(t, duration_);
        if (hi > lo) m_.density_integral += static_cast<double>(contending_) * (hi - lo);
        last_density_t_ = t;
        contending_ += delta;
    }

    void finalize() {
        density_delta(0, duration_);
        m_.measured_time = duration_ - warmup_;
        for (const auto& veh : veh_) {
            if (veh.has_packet && veh.gen_time >= warmup_) ++m_.inflight_end;
            // countdown slots elapsed for stints still armed at the end
            if (veh.state == VState::armed && veh.countdown_start < slots_total_) {
                m_.backoff_slots_observed +=
                    static_cast<std::uint64_t>(slots_total_ - veh.countdown_start);
            }
        }
    }

    // immutable configuration
    ScenarioParams p_;
    DerivedTiming tm_;
    double sigma_, inv_lambda_, duration_, warmup_;
    bool collect_trace_, oracle_mode_;
    std::int64_t slots_total_ = 0, tx_slots_ = 0, rearm_slots_ = 0;
    double difs_time_ = 0.0;
    SplitMix64 rng_;
    std::unique_ptr<MacPolicy> policy_;

    // channel and vehicles
    std::vector<Vehicle> veh_;
    std::int64_t busy_until_ = 0;
    std::int64_t busy_end_slot_ = -1;
    bool active_valid_ = false;
    bool active_collided_ = false;
    std::vector<TxPacket> active_pkts_;

    std::priority_queue<ArrivalEv, std::vector<ArrivalEv>, ArrivalCmp> arrivals_;
    std::priority_queue<SenseEv, std::vector<SenseEv>, SenseCmp> senses_;
    std::priority_queue<FireEv, std::vector<FireEv>, FireCmp> fires_;
    std::vector<Ref> waiting_, armed_, sensing_;

    // metrics
    RepMetrics m_;
    std::vector<PacketRecord> trace_;
    std::vector<BackoffDraw> draws_;
    std::vector<std::int64_t> collided_run_;
    int contending_ = 0;
    double last_density_t_ = 0.0;
};

}  // namespace

SimResult run_replication(const ScenarioParams& p, MacId mac, double duration_s,
                          double warmup_s, std::uint64_t seed, bool collect_trace,
                          const SimHooks& hooks) {
    validate(p);
    Engine engine(p, mac, duration_s, warmup_s, seed, collect_trace, hooks);
    return engine.run();
}

SimMetrics run_simulation(const ScenarioParams& p, MacId mac, double duration_s,
                          double warmup_s, std::uint64_t seed, int replications,
                          const SimHooks& hooks, int threads) {
    validate(p);
    if (replications < 1) throw InvalidParams("replications", "need at least one replication");
    std::vector<RepMetrics> reps(static_cast<std::size_t>(replications));

    int pool = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    pool = std::clamp(pool, 1, replications);
    std::atomic<int> cursor{0};
    auto worker = [&] {
        for (;;) {
            const int r = cursor.fetch_add(1);
            if (r >= replications) return;
            reps[static_cast<std::size_t>(r)] =
                run_replication(p, mac, duration_s, warmup_s,
                                replication_seed(seed, static_cast<std::uint64_t>(r)), false,
                                hooks)
                    .metrics;
        }
    };
    std::vector<std::thread> extra;
    for (int i = 1; i < pool; ++i) extra.emplace_back(worker);
    worker();
    for (auto& th : extra) th.join();

    // merge in replication order: results do not depend on scheduling
    SimMetrics out;
    out.replications = replications;
    out.seed = seed;
    std::vector<double> pdr, svc, acc, rec, den;
    pdr.reserve(reps.size());
    for (const auto& r : reps) {
        pdr.push_back(r.pdr());
        svc.push_back(r.mean_service());
        acc.push_back(r.mean_access());
        rec.push_back(r.mean_reception());
        den.push_back(r.mean_density());
        out.generated += r.generated;
        out.delivered += r.delivered;
        out.collided += r.collided;
        out.overload_drops += r.overload_drops;
    }
    out.pdr = estimate99(pdr);
    out.service = estimate99(svc);
    out.access = estimate99(acc);
    out.reception = estimate99(rec);
    out.density = estimate99(den);
    out.reps = std::move(reps);
    return out;
}

double reception_delay_mean(const std::vector<PacketRecord>& trace, double lambda) {
    if (!(lambda > 0)) throw InvalidParams("lambda", "lambda must be > 0");
    std::map<int, std::vector<const PacketRecord*>> per_vehicle;
    for (const auto& r : trace) per_vehicle[r.vehicle].push_back(&r);
    KahanSum sum;
    std::uint64_t samples = 0;
    for (auto& [v, recs] : per_vehicle) {
        std::sort(recs.begin(), recs.end(), [](const PacketRecord* a, const PacketRecord* b) {
            return a->gen_time < b->gen_time;
        });
        std::int64_t run = 0;
        for (const auto* r : recs) {
            if (r->outcome == PacketOutcome::collided) {
                ++run;
            } else {
                sum.add(static_cast<double>(run) / lambda + r->service_time);
                ++samples;
                run = 0;
            }
        }
        // a trailing collided run has no resolving delivery; dropped
    }
    return samples ? sum.value() / static_cast<double>(samples) : 0.0;
}

void write_trace_csv(const std::string& path, const std::vector<PacketRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file " + path);
    out << "vehicle_id,gen_time_s,tx_start_s,outcome,access_delay_s,service_time_s\n";
    out.precision(17);
    for (const auto& r : trace) {
        out << r.vehicle << ',' << r.gen_time << ',' << r.tx_start << ','
            << (r.outcome == PacketOutcome::delivered ? "delivered" : "collided") << ','
            << r.access_delay << ',' << r.service_time << '\n';
    }
}

}  // namespace dsrc
