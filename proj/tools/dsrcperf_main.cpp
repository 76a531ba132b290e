#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dsrc/dot11p_model.hpp"
#include "dsrc/errors.hpp"
#include "dsrc/report.hpp"
#include "dsrc/results.hpp"
#include "dsrc/scenario.hpp"
#include "dsrc/sim.hpp"
#include "dsrc/spcdc_model.hpp"
#include "dsrc/svg_plot.hpp"
#include "dsrc/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitCheckFailed = 3;

void print_dot11p(const dsrc::Dot11pAnalysis& a) {
    std::printf("dot11p analytic results\n");
    std::printf("  rho                 %.10g\n", a.rho);
    std::printf("  p_b                 %.10g\n", a.p_b);
    std::printf("  p_c                 %.10g\n", a.p_c);
    std::printf("  pdr                 %.10g\n", a.pdr);
    std::printf("  pi0                 %.10g\n", a.pi0);
    std::printf("  E[M]                %.10g\n", a.e_m);
    std::printf("  E[T_I]   [s]        %.10g\n", a.e_ti);
    std::printf("  E[T_B]   [s]        %.10g\n", a.e_tb);
    std::printf("  E[T_res] [s]        %.10g\n", a.e_tres);
    std::printf("  E[T_A]   [s]        %.10g\n", a.e_ta);
    std::printf("  E[T_s]   [s]        %.10g\n", a.e_s);
    std::printf("  E[T_c]   [s]        %.10g\n", a.e_tc);
    std::printf("  E[T_re]  [s]        %.10g\n", a.e_tre);
    std::printf("  contention density  %.10g\n", a.cs_prime);
    std::printf("  iterations          %d (residual %.3g)\n", a.iterations, a.residual);
    for (const auto& w : a.warnings) std::printf("  warning: %s\n", w.c_str());
}

void print_spcdc(const dsrc::SpcdcAnalysis& a) {
    std::printf("spcdc analytic results\n");
    std::printf("  c_s                 %.10g\n", a.c_s);
    std::printf("  gamma               %.10g\n", a.gamma);
    std::printf("  P_ck(0)             %.10g\n", a.p_ck0);
    std::printf("  n_b                 %.10g\n", a.n_b);
    std::printf("  E[T_db]  [s]        %.10g\n", a.e_tdb);
    std::printf("  E[T_di]  [s]        %.10g\n", a.e_tdi);
    std::printf("  E[T_d]   [s]        %.10g\n", a.e_td);
    std::printf("  p_c upper bound     %.10g\n", a.p_c_upper);
    std::printf("  pdr lower bound     %.10g\n", a.pdr_lower);
    std::printf("  E[T_c]   [s]        %.10g\n", a.e_tc);
    std::printf("  E[T_re]  [s]        %.10g\n", a.e_tre);
    std::printf("  iterations          %d (residual %.3g)\n", a.iterations, a.residual);
    for (const auto& w : a.warnings) std::printf("  warning: %s\n", w.c_str());
}

void print_metrics(const dsrc::SimMetrics& m) {
    std::printf("simulation results (%d replications, seed %llu)\n", m.replications,
                static_cast<unsigned long long>(m.seed));
    std::printf("  pdr                 %.6f +- %.6f (99%% CI)\n", m.pdr.mean, m.pdr.ci99);
    std::printf("  mean service  [s]   %.8g +- %.3g\n", m.service.mean, m.service.ci99);
    std::printf("  mean access   [s]   %.8g\n", m.access.mean);
    std::printf("  mean reception[s]   %.8g +- %.3g\n", m.reception.mean, m.reception.ci99);
    std::printf("  contention density  %.6g +- %.3g\n", m.density.mean, m.density.ci99);
    std::printf("  generated/delivered/collided  %llu/%llu/%llu\n",
                static_cast<unsigned long long>(m.generated),
                static_cast<unsigned long long>(m.delivered),
                static_cast<unsigned long long>(m.collided));
    std::printf("  overload drops      %llu\n",
                static_cast<unsigned long long>(m.overload_drops));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic models and slot-level Monte Carlo simulation of DSRC "
                 "broadcast MACs (802.11p DCF and SpCDC)"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", results_path, trace_path, report_path;
    std::string policy_list = "dot11p,spcdc";
    std::uint64_t seed = 1;
    int reps = 20;
    double tol = 1e-10, duration = 100.0, warmup = 2.0;
    int threads = 0;
    bool default_grid = false, no_sim = false, no_analytic = false;

    auto* analyze = app.add_subcommand("analyze", "solve the analytic models for one scenario");
    analyze->add_option("--scenario", scenario_path, "scenario file (key-value or JSON)");
    analyze->add_option("--policy", policy_list, "comma list: dot11p, spcdc, dot11p:cw=128");
    analyze->add_option("--tol", tol, "fixed-point residual threshold");

    auto* simulate = app.add_subcommand("simulate", "run the simulator for one scenario");
    simulate->add_option("--scenario", scenario_path, "scenario file");
    simulate->add_option("--policy", policy_list, "single policy id");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--reps", reps, "replications");
    simulate->add_option("--duration", duration, "simulated seconds per replication");
    simulate->add_option("--warmup", warmup, "warmup seconds excluded from metrics");
    simulate->add_option("--trace", trace_path, "write per-packet trace CSV (first replication)");
    simulate->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write results");
    sweep->add_option("--scenario", scenario_path, "sweep scenario file");
    sweep->add_flag("--default-grid", default_grid, "use the built-in measurement grid");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "master seed");
    sweep->add_option("--reps", reps, "replications per simulation row");
    sweep->add_option("--policy", policy_list, "comma list of policies (overrides file)");
    sweep->add_option("--tol", tol, "fixed-point residual threshold");
    sweep->add_option("--duration", duration, "simulated seconds per replication");
    sweep->add_option("--warmup", warmup, "warmup seconds");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
    sweep->add_flag("--no-sim", no_sim, "skip simulation rows");
    sweep->add_flag("--no-analytic", no_analytic, "skip analytic rows");

    auto* plot = app.add_subcommand("plot", "render SVG comparison plots from results");
    plot->add_option("--results", results_path, "results.csv path")->required();
    plot->add_option("--out", out_dir, "output directory for SVGs");

    auto* report = app.add_subcommand("report", "comparison report with threshold checks");
    report->add_option("--results", results_path, "results.csv path")->required();
    report->add_option("--out", report_path, "write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            dsrc::ScenarioParams p = scenario_path.empty()
                                         ? dsrc::ScenarioParams{}
                                         : dsrc::load_scenario_file(scenario_path);
            for (const auto& tok_spec : [&] {
                     std::vector<dsrc::PolicySpec> out;
                     std::stringstream ss(policy_list);
                     std::string tok;
                     while (std::getline(ss, tok, ',')) {
                         if (!tok.empty()) out.push_back(dsrc::parse_policy(tok));
                     }
                     return out;
                 }()) {
                dsrc::ScenarioParams pp = p;
                if (tok_spec.cw) pp.cw = *tok_spec.cw;
                std::printf("== policy %s ==\n", tok_spec.id.c_str());
                if (tok_spec.mac == dsrc::MacId::dot11p) {
                    dsrc::Dot11pOptions opt;
                    opt.tol = tol;
                    print_dot11p(dsrc::solve_fixed_point(pp, opt));
                } else {
                    dsrc::SpcdcOptions opt;
                    opt.tol = tol;
                    print_spcdc(dsrc::solve_spcdc_fixed_point(pp, opt));
                }
            }
            return kExitOk;
        }

        if (simulate->parsed()) {
            dsrc::ScenarioParams p = scenario_path.empty()
                                         ? dsrc::ScenarioParams{}
                                         : dsrc::load_scenario_file(scenario_path);
            const auto spec = dsrc::parse_policy(policy_list);
            if (spec.cw) p.cw = *spec.cw;
            if (!trace_path.empty()) {
                const auto one = dsrc::run_replication(p, spec.mac, duration, warmup, seed, true);
                dsrc::write_trace_csv(trace_path, one.trace);
            }
            const auto m = dsrc::run_simulation(p, spec.mac, duration, warmup, seed, reps, {},
                                                threads);
            print_metrics(m);
            return kExitOk;
        }

        if (sweep->parsed()) {
            dsrc::SweepSpec spec;
            if (default_grid || scenario_path.empty()) {
                spec = dsrc::default_table_sweep();
            } else {
                spec = dsrc::sweep_from_kv(dsrc::load_kv_file(scenario_path));
            }
            if (sweep->count("--seed")) spec.seed = seed;
            if (sweep->count("--reps")) spec.replications = reps;
            if (sweep->count("--tol")) spec.tol = tol;
            if (sweep->count("--duration")) spec.sim_duration = duration;
            if (sweep->count("--warmup")) spec.warmup = warmup;
            if (sweep->count("--threads")) spec.threads = threads;
            if (sweep->count("--policy")) {
                spec.policies.clear();
                std::stringstream ss(policy_list);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) spec.policies.push_back(dsrc::parse_policy(tok));
                }
            }
            if (no_sim) spec.run_simulation = false;
            if (no_analytic) spec.run_analytic = false;

            std::filesystem::create_directories(out_dir);
            const auto rows = dsrc::run_sweep(spec, out_dir + "/results.partial.csv");
            dsrc::write_results_csv(out_dir + "/results.csv", rows);
            dsrc::write_results_json(out_dir + "/results.json", rows);
            std::printf("wrote %zu rows to %s/results.csv\n", rows.size(), out_dir.c_str());
            int failed = 0;
            for (const auto& r : rows) {
                if (!r.error.empty()) {
                    ++failed;
                    std::fprintf(stderr, "row error (%s, N=%d, %s, %s): %s\n", r.case_id.c_str(),
                                 r.n_vehicles, r.policy.c_str(), r.source.c_str(),
                                 r.error.c_str());
                }
            }
            if (failed) std::printf("%d row(s) recorded errors\n", failed);
            return kExitOk;
        }

        if (plot->parsed()) {
            const auto rows = dsrc::read_results_csv(results_path);
            const auto files = dsrc::render_plots(rows, out_dir);
            for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
            return kExitOk;
        }

        if (report->parsed()) {
            const auto rows = dsrc::read_results_csv(results_path);
            const auto outcome = dsrc::compare_report(rows);
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                out << outcome.text;
                std::printf("wrote %s\n", report_path.c_str());
            }
            std::fputs(outcome.text.c_str(), stdout);
            return outcome.all_passed ? kExitOk : kExitCheckFailed;
        }
    } catch (const dsrc::NoConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConvergence;
    } catch (const dsrc::InvalidParams& e) {
        std::fprintf(stderr, "error (%s): %s\n", e.field().c_str(), e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitOk;
}
