#include "dsrc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dsrc/dot11p_model.hpp"
#include "dsrc/errors.hpp"
#include "dsrc/rng.hpp"
#include "dsrc/sim.hpp"
#include "dsrc/spcdc_model.hpp"

namespace dsrc {

PolicySpec parse_policy(const std::string& token) {
    PolicySpec spec;
    std::string name = token;
    const auto colon = token.find(':');
    if (colon != std::string::npos) {
        name = token.substr(0, colon);
        const std::string opt = token.substr(colon + 1);
        const auto eq = opt.find('=');
        if (eq == std::string::npos || opt.substr(0, eq) != "cw") {
            throw InvalidParams("policy", "unknown policy option '" + opt + "' in " + token);
        }
        spec.cw = std::stoi(opt.substr(eq + 1));
    }
    spec.mac = mac_from_string(name);
    spec.id = name;
    if (spec.cw) spec.id += "_cw" + std::to_string(*spec.cw);
    return spec;
}

void apply_sweep_value(ScenarioParams& p, const std::string& key, double value) {
    if (key == "n_vehicles") p.n_vehicles = static_cast<int>(std::llround(value));
    else if (key == "lambda") p.lambda = value;
    else if (key == "cw") p.cw = static_cast<int>(std::llround(value));
    else if (key == "payload_bytes") p.payload_bytes = value;
    else if (key == "data_rate") p.data_rate = value;
    else if (key == "spcdc_c") p.spcdc_c = value;
    else throw InvalidParams("sweep_key", "cannot sweep over '" + key + "'");
}

std::string case_label(const CaseSpec& c) {
    if (!c.id.empty()) return c.id;
    std::ostringstream out;
    out << c.data_rate / 1e6 << "Mbps_" << c.lambda << "pps_" << c.payload_bytes << "B";
    return out.str();
}

SweepSpec default_table_sweep() {
    SweepSpec s;
    s.base = ScenarioParams{};
    s.sweep_key = "n_vehicles";
    for (int n = 10; n <= 200; n += 10) s.values.push_back(n);
    s.cases = {
        {6e6, 10.0, 200.0, ""},
        {12e6, 2.0, 400.0, ""},
        {24e6, 2.0, 200.0, ""},
    };
    for (auto& c : s.cases) c.id = case_label(c);
    s.policies = {parse_policy("dot11p"), parse_policy("dot11p:cw=128"), parse_policy("spcdc")};
    return s;
}

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        // "10..200:10" range shorthand
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const double lo = std::stod(item.substr(0, dots));
            std::string rest = item.substr(dots + 2);
            double step = 1;
            const auto colon = rest.find(':');
            if (colon != std::string::npos) {
                step = std::stod(rest.substr(colon + 1));
                rest.erase(colon);
            }
            const double hi = std::stod(rest);
            for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
        } else {
            out.push_back(std::stod(item));
        }
    }
    return out;
}

std::vector<std::string> parse_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

SweepSpec sweep_from_kv(const KeyValues& kv) {
    SweepSpec s;
    s.base = scenario_from_kv(kv);
    if (auto it = kv.find("sweep_key"); it != kv.end()) s.sweep_key = it->second;
    if (auto it = kv.find("sweep_values"); it != kv.end()) s.values = parse_list(it->second);
    if (auto it = kv.find("cases"); it != kv.end()) {
        // rate:lambda:payload triplets, e.g. 6e6:10:200
        for (const auto& tok : parse_tokens(it->second)) {
            std::istringstream ts(tok);
            std::string a, b, c;
            if (!std::getline(ts, a, ':') || !std::getline(ts, b, ':') || !std::getline(ts, c)) {
                throw InvalidParams("cases", "case must be rate:lambda:payload, got '" + tok + "'");
            }
            CaseSpec cs{std::stod(a), std::stod(b), std::stod(c), ""};
            cs.id = case_label(cs);
            s.cases.push_back(cs);
        }
    }
    if (auto it = kv.find("policies"); it != kv.end()) {
        for (const auto& tok : parse_tokens(it->second)) s.policies.push_back(parse_policy(tok));
    }
    if (auto it = kv.find("replications"); it != kv.end()) s.replications = std::stoi(it->second);
    if (auto it = kv.find("sim_duration"); it != kv.end()) s.sim_duration = std::stod(it->second);
    if (auto it = kv.find("warmup"); it != kv.end()) s.warmup = std::stod(it->second);
    if (auto it = kv.find("seed"); it != kv.end()) s.seed = std::stoull(it->second);
    if (auto it = kv.find("tol"); it != kv.end()) s.tol = std::stod(it->second);
    if (auto it = kv.find("sources"); it != kv.end()) {
        s.run_analytic = it->second.find("analytic") != std::string::npos;
        s.run_simulation = it->second.find("simulation") != std::string::npos;
    }
    if (s.policies.empty()) s.policies.push_back(parse_policy("dot11p"));
    return s;
}

namespace {

struct Task {
    std::size_t case_idx, value_idx, policy_idx;
};

ScenarioParams task_params(const SweepSpec& spec, const Task& t) {
    ScenarioParams p = spec.base;
    if (!spec.cases.empty()) {
        const auto& c = spec.cases[t.case_idx];
        p.data_rate = c.data_rate;
        p.lambda = c.lambda;
        p.payload_bytes = c.payload_bytes;
    }
    apply_sweep_value(p, spec.sweep_key, spec.values[t.value_idx]);
    const auto& pol = spec.policies[t.policy_idx];
    if (pol.cw) p.cw = *pol.cw;
    return p;
}

ResultRow base_row(const SweepSpec& spec, const Task& t) {
    ResultRow r;
    r.case_id = spec.cases.empty() ? "base" : spec.cases[t.case_idx].id;
    r.policy = spec.policies[t.policy_idx].id;
    return r;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const std::string& partial_csv_path) {
    if (spec.policies.empty()) throw InvalidParams("policies", "need at least one policy");
    if (spec.sweep_key.empty()) throw InvalidParams("sweep_key", "sweep_key must be set");

    std::vector<Task> tasks;
    const std::size_t n_cases = spec.cases.empty() ? 1 : spec.cases.size();
    for (std::size_t c = 0; c < n_cases; ++c) {
        for (std::size_t v = 0; v < spec.values.size(); ++v) {
            for (std::size_t p = 0; p < spec.policies.size(); ++p) tasks.push_back({c, v, p});
        }
    }

    std::vector<std::vector<ResultRow>> per_task(tasks.size());
    std::ofstream partial;
    std::mutex partial_mu;
    if (!partial_csv_path.empty()) {
        partial.open(partial_csv_path);
        if (!partial) throw std::runtime_error("cannot open " + partial_csv_path);
        partial << kResultCsvHeader << '\n' << std::flush;
    }

    auto run_task = [&](std::size_t idx) {
        const Task& t = tasks[idx];
        std::vector<ResultRow> rows;
        ScenarioParams p;
        std::string param_error;
        try {
            p = task_params(spec, t);
            validate(p);
        } catch (const std::exception& e) {
            param_error = e.what();
        }
        const auto& pol = spec.policies[t.policy_idx];
        const std::uint64_t row_seed =
            mix_seed(mix_seed(mix_seed(spec.seed, t.case_idx), t.value_idx), t.policy_idx);

        if (spec.run_analytic) {
            ResultRow r = base_row(spec, t);
            r.source = "analytic";
            r.n_vehicles = param_error.empty() ? p.n_vehicles : 0;
            const auto start = std::chrono::steady_clock::now();
            try {
                if (!param_error.empty()) throw std::runtime_error(param_error);
                if (pol.mac == MacId::dot11p) {
                    Dot11pOptions opt;
                    opt.tol = spec.tol;
                    const auto a = solve_fixed_point(p, opt);
                    r.pdr = a.pdr;
                    r.mean_delay_s = a.e_s;
                    r.mean_reception_delay_s = a.e_tre;
                    r.contention_density = a.cs_prime;
                } else {
                    SpcdcOptions opt;
                    opt.tol = spec.tol;
                    const auto a = solve_spcdc_fixed_point(p, opt);
                    r.pdr = a.pdr_lower;
                    r.mean_delay_s = a.e_td;
                    r.mean_reception_delay_s = a.e_tre;
                    r.contention_density = a.c_s;
                }
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
            rows.push_back(std::move(r));
        }
        if (spec.run_simulation) {
            ResultRow r = base_row(spec, t);
            r.source = "simulation";
            r.n_vehicles = param_error.empty() ? p.n_vehicles : 0;
            r.seed = row_seed;
            const auto start = std::chrono::steady_clock::now();
            try {
                if (!param_error.empty()) throw std::runtime_error(param_error);
                // rows already run in parallel; keep replications sequential
                const auto m = run_simulation(p, pol.mac, spec.sim_duration, spec.warmup,
                                              row_seed, spec.replications, SimHooks{}, 1);
                r.pdr = m.pdr.mean;
                r.pdr_ci = m.pdr.ci99;
                r.mean_delay_s = m.service.mean;
                r.mean_reception_delay_s = m.reception.mean;
                r.contention_density = m.density.mean;
                r.overload_drops = m.overload_drops;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
            rows.push_back(std::move(r));
        }
        if (partial.is_open()) {
            std::lock_guard<std::mutex> lock(partial_mu);
            for (const auto& r : rows) partial << result_row_to_csv(r) << '\n';
            partial << std::flush;
        }
        per_task[idx] = std::move(rows);
    };

    int pool = spec.threads > 0 ? spec.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    pool = std::clamp<int>(pool, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= tasks.size()) return;
            run_task(idx);
        }
    };
    std::vector<std::thread> extra;
    for (int i = 1; i < pool; ++i) extra.emplace_back(worker);
    worker();
    for (auto& th : extra) th.join();

    std::vector<ResultRow> rows;
    for (auto& chunk : per_task) {
        for (auto& r : chunk) rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.case_id != b.case_id) return a.case_id < b.case_id;
        if (a.n_vehicles != b.n_vehicles) return a.n_vehicles < b.n_vehicles;
        if (a.policy != b.policy) return a.policy < b.policy;
        return a.source < b.source;
    });
    return rows;
}

}  // namespace dsrc
