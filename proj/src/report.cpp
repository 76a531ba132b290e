#include "dsrc/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dsrc/errors.hpp"

namespace dsrc {

namespace {

using PointKey = std::pair<std::string, int>;  // (case, N)

struct Check {
    std::string label;
    bool passed;
    std::string detail;
};

std::string verdict(const Check& c) {
    return (c.passed ? "[PASS] " : "[FAIL] ") + c.label + ": " + c.detail;
}

std::string fmtg(double v) {
    std::ostringstream out;
    out.precision(5);
    out << v;
    return out.str();
}

}  // namespace

ReportOutcome compare_report(const std::vector<ResultRow>& rows, const ReportThresholds& thr) {
    // (case, N) -> policy -> source -> row
    std::map<PointKey, std::map<std::string, std::map<std::string, const ResultRow*>>> table;
    std::set<std::string> policies;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        table[{r.case_id, r.n_vehicles}][r.policy][r.source] = &r;
        policies.insert(r.policy);
    }
    if (table.empty()) throw IncomparableTable("result table holds no usable rows");

    const bool has_spcdc = policies.count("spcdc") > 0;
    const bool has_dot11p = policies.count("dot11p") > 0;
    std::string cw_variant;  // e.g. dot11p_cw128
    for (const auto& p : policies) {
        if (p.rfind("dot11p_cw", 0) == 0) cw_variant = p;
    }

    // grids must align for policy deltas
    if (has_spcdc && has_dot11p) {
        std::set<PointKey> g1, g2;
        for (const auto& [key, by_policy] : table) {
            if (by_policy.count("dot11p") && by_policy.at("dot11p").count("simulation")) {
                g1.insert(key);
            }
            if (by_policy.count("spcdc") && by_policy.at("spcdc").count("simulation")) {
                g2.insert(key);
            }
        }
        if (!g1.empty() && !g2.empty() && g1 != g2) {
            throw IncomparableTable("dot11p and spcdc simulation grids do not align");
        }
    }

    std::ostringstream out;
    std::vector<Check> checks;
    out << "DSRC broadcast MAC comparison report\n";
    out << "====================================\n\n";

    // heavy-load point: lowest simulated dot11p PDR (ties to the larger N)
    PointKey heavy{};
    bool have_heavy = false;
    double worst_pdr = 2.0;
    for (const auto& [key, by_policy] : table) {
        auto it = by_policy.find("dot11p");
        if (it == by_policy.end()) continue;
        auto sit = it->second.find("simulation");
        if (sit == it->second.end()) continue;
        const double pdr = sit->second->pdr;
        if (pdr < worst_pdr || (pdr == worst_pdr && key.second > heavy.second)) {
            worst_pdr = pdr;
            heavy = key;
            have_heavy = true;
        }
    }
    if (have_heavy) {
        out << "heavy-load point: case " << heavy.first << ", N = " << heavy.second << "\n\n";
    }

    // analytic vs simulation residuals
    {
        out << "analytic vs simulation\n----------------------\n";
        double max_pdr_resid = 0, max_delay_rel_dot11p = 0, max_delay_rel_spcdc = 0;
        int pts_dot11p = 0, pts_spcdc = 0;
        for (const auto& [key, by_policy] : table) {
            for (const auto& [policy, by_source] : by_policy) {
                auto a = by_source.find("analytic");
                auto s = by_source.find("simulation");
                if (a == by_source.end() || s == by_source.end()) continue;
                const double delay_rel =
                    s->second->mean_delay_s > 0
                        ? std::abs(a->second->mean_delay_s - s->second->mean_delay_s) /
                              s->second->mean_delay_s
                        : 0.0;
                if (policy.rfind("dot11p", 0) == 0) {
                    max_pdr_resid = std::max(max_pdr_resid, std::abs(a->second->pdr - s->second->pdr));
                    max_delay_rel_dot11p = std::max(max_delay_rel_dot11p, delay_rel);
                    ++pts_dot11p;
                } else {
                    max_delay_rel_spcdc = std::max(max_delay_rel_spcdc, delay_rel);
                    ++pts_spcdc;
                }
            }
        }
        if (pts_dot11p > 0) {
            out << "dot11p grid points compared: " << pts_dot11p << "\n";
            checks.push_back({"dot11p PDR agreement",
                              max_pdr_resid <= thr.pdr_agreement,
                              "max |analytic - sim| = " + fmtg(max_pdr_resid) +
                                  " (limit " + fmtg(thr.pdr_agreement) + ")"});
            checks.push_back({"dot11p delay agreement",
                              max_delay_rel_dot11p <= thr.delay_rel,
                              "max relative residual = " + fmtg(max_delay_rel_dot11p) +
                                  " (limit " + fmtg(thr.delay_rel) + ")"});
        }
        if (pts_spcdc > 0) {
            out << "spcdc grid points compared: " << pts_spcdc << "\n";
            checks.push_back({"spcdc delay agreement",
                              max_delay_rel_spcdc <= thr.delay_rel,
                              "max relative residual = " + fmtg(max_delay_rel_spcdc) +
                                  " (limit " + fmtg(thr.delay_rel) + ")"});
        }
        out << '\n';
    }

    // PDR lower bound must sit below the simulated spcdc PDR everywhere
    if (has_spcdc) {
        int points = 0, violations = 0;
        for (const auto& [key, by_policy] : table) {
            auto it = by_policy.find("spcdc");
            if (it == by_policy.end()) continue;
            auto a = it->second.find("analytic");
            auto s = it->second.find("simulation");
            if (a == it->second.end() || s == it->second.end()) continue;
            ++points;
            const double lower_edge = s->second->pdr - s->second->pdr_ci.value_or(0.0);
            if (a->second->pdr > lower_edge) ++violations;
        }
        if (points > 0) {
            checks.push_back({"spcdc PDR lower bound validity", violations == 0,
                              std::to_string(violations) + " violation(s) over " +
                                  std::to_string(points) + " grid points"});
        }
    }

    // policy deltas per grid point
    if (has_spcdc && has_dot11p) {
        out << "policy deltas (simulation)\n--------------------------\n";
        out << "case,N,pdr_dot11p,pdr_spcdc,delta_pdr,reception_dot11p,reception_spcdc\n";
        for (const auto& [key, by_policy] : table) {
            auto d = by_policy.find("dot11p");
            auto s = by_policy.find("spcdc");
            if (d == by_policy.end() || s == by_policy.end()) continue;
            auto ds = d->second.find("simulation");
            auto ss = s->second.find("simulation");
            if (ds == d->second.end() || ss == s->second.end()) continue;
            out << key.first << ',' << key.second << ',' << fmtg(ds->second->pdr) << ','
                << fmtg(ss->second->pdr) << ',' << fmtg(ss->second->pdr - ds->second->pdr) << ','
                << fmtg(ds->second->mean_reception_delay_s) << ','
                << fmtg(ss->second->mean_reception_delay_s) << '\n';
        }
        out << '\n';

        if (have_heavy) {
            const auto& hp = table.at(heavy);
            const auto* d16 = hp.count("dot11p") && hp.at("dot11p").count("simulation")
                                  ? hp.at("dot11p").at("simulation")
                                  : nullptr;
            const auto* sp = hp.count("spcdc") && hp.at("spcdc").count("simulation")
                                 ? hp.at("spcdc").at("simulation")
                                 : nullptr;
            if (d16 && sp) {
                const double gain = sp->pdr - d16->pdr;
                checks.push_back({"spcdc PDR gain at heavy load", gain >= thr.spcdc_pdr_gain,
                                  "spcdc - dot11p = " + fmtg(gain) + " (need >= " +
                                      fmtg(thr.spcdc_pdr_gain) + ")"});
            }
            const auto* dcw = !cw_variant.empty() && hp.count(cw_variant) &&
                                      hp.at(cw_variant).count("simulation")
                                  ? hp.at(cw_variant).at("simulation")
                                  : nullptr;
            if (dcw && sp && dcw->mean_reception_delay_s > 0) {
                const double ratio = sp->mean_reception_delay_s / dcw->mean_reception_delay_s;
                checks.push_back({"spcdc reception-delay reduction vs " + cw_variant,
                                  ratio <= thr.reception_ratio,
                                  "ratio = " + fmtg(ratio) + " (need <= " +
                                      fmtg(thr.reception_ratio) + ")"});
                const double gap = dcw->contention_density - sp->contention_density;
                checks.push_back({"contention-density gap vs " + cw_variant,
                                  gap >= thr.density_gap_lo && gap <= thr.density_gap_hi,
                                  "gap = " + fmtg(gap) + " (need within [" +
                                      fmtg(thr.density_gap_lo) + ", " +
                                      fmtg(thr.density_gap_hi) + "])"});
            }
        }
    }

    out << "threshold checks\n----------------\n";
    bool all = true;
    for (const auto& c : checks) {
        out << verdict(c) << '\n';
        all = all && c.passed;
    }
    if (checks.empty()) {
        out << "(no comparable policy pairs found; nothing to check)\n";
    }

    ReportOutcome outcome;
    outcome.text = out.str();
    outcome.all_passed = all;
    return outcome;
}

}  // namespace dsrc
