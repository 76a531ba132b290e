#include "dsrc/dot11p_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dsrc/errors.hpp"

namespace dsrc {

double pi0(int cw) {
    if (cw < 1) throw InvalidParams("cw", "cw must be >= 1");
    return 2.0 / (1.0 + static_cast<double>(cw));
}

std::vector<double> stationary_backoff_distribution(int cw) {
    const double p0 = pi0(cw);
    std::vector<double> pi(static_cast<std::size_t>(cw));
    for (int m = 0; m < cw; ++m) {
        pi[static_cast<std::size_t>(m)] =
            (static_cast<double>(cw - m) / static_cast<double>(cw)) * p0;
    }
    return pi;
}

double mean_collision_delay(double p_c, double lambda) {
    if (!(lambda > 0)) throw InvalidParams("lambda", "lambda must be > 0");
    if (p_c < 0 || p_c > 1) throw InvalidParams("p_c", "p_c must lie in [0,1]");
    if (p_c == 1.0) throw std::domain_error("mean collision delay undefined at p_c = 1");
    return p_c / ((1.0 - p_c) * lambda);
}

double contention_density_dot11p(const Dot11pAnalysis& a, const ScenarioParams& p) {
    const double q = 1.0 - std::pow(1.0 - a.rho * a.pi0, p.n_vehicles - 1);
    return static_cast<double>(p.cw - 1) * q / 2.0;
}

Dot11pAnalysis solve_fixed_point(const ScenarioParams& p, const Dot11pOptions& opt) {
    validate(p);
    if (!(opt.tol > 0)) throw InvalidParams("tol", "tol must be > 0");
    if (opt.max_iter < 1) throw InvalidParams("max_iter", "max_iter must be >= 1");
    if (!(opt.damping > 0 && opt.damping <= 1)) {
        throw InvalidParams("damping", "damping must lie in (0,1]");
    }

    const DerivedTiming tm = derive_timing(p);
    const double ttr = tm.t_tr;
    const double sigma = p.slot;
    const double difs = p.difs;
    const double lam = p.lambda;
    const int n = p.n_vehicles;
    const double pi = pi0(p.cw);
    const double em = static_cast<double>(p.cw - 1) / 2.0;
    const double etres = ttr / 2.0 + difs;
    // Pairwise collisions: the busy-airtime correction factor is 1/2.
    const double collision_share = 0.5;

    double rho = 0.0, pc = 0.0, pb = 0.0;
    double resid = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < opt.max_iter) {
        ++it;
        const double q = 1.0 - std::pow(1.0 - rho * pi, n - 1);
        const double pb_cand =
            std::clamp((n - 1) * lam * ttr * (1.0 - collision_share * pc), 0.0, 1.0);
        const double eti = q * (ttr + difs);
        const double etb = (sigma + eti) * em;
        const double eta = difs + pb_cand * (etb + etres);
        const double rho_cand = std::clamp(lam * (eta + ttr), 0.0, 1.0);
        const double pc_cand = pb_cand * q;
        resid = std::max({std::abs(rho_cand - rho), std::abs(pc_cand - pc),
                          std::abs(pb_cand - pb)});
        pb = pb_cand;
        rho += opt.damping * (rho_cand - rho);
        pc += opt.damping * (pc_cand - pc);
        if (resid < opt.tol) break;
    }
    if (!(resid < opt.tol)) {
        std::ostringstream msg;
        msg << "dot11p fixed point did not converge: residual " << resid << " after " << it
            << " iterations (rho=" << rho << ", p_c=" << pc << ")";
        throw NoConvergence(msg.str(), resid, it);
    }

    // One consistent pass from the converged iterate; the identity chain of
    // the delay decomposition holds exactly on the reported values.
    Dot11pAnalysis a;
    a.iterations = it;
    a.residual = resid;
    a.pi0 = pi;
    a.pi_m = stationary_backoff_distribution(p.cw);
    a.n_c = 2.0;
    a.e_m = em;
    const double q = 1.0 - std::pow(1.0 - rho * pi, n - 1);
    const double pb_raw = (n - 1) * lam * ttr * (1.0 - collision_share * pc);
    a.pb_clamped = pb_raw > 1.0;
    if (a.pb_clamped) {
        a.warnings.push_back(
            "busy probability linearization exceeded 1 and was clamped; "
            "the model is outside its validity range at this load");
    }
    a.p_b = std::clamp(pb_raw, 0.0, 1.0);
    a.e_ti = q * (ttr + difs);
    a.e_tb = (sigma + a.e_ti) * a.e_m;
    a.e_tres = etres;
    a.e_ta = difs + a.p_b * (a.e_tb + a.e_tres);
    a.e_s = a.e_ta + ttr;
    const double rho_out = lam * a.e_s;
    if (rho_out > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "converged buffer occupancy rho = " << rho_out
            << " exceeds 1; offered load is infeasible for periodic broadcast";
        throw Infeasible(msg.str(), rho_out);
    }
    a.rho = std::min(rho_out, 1.0);
    a.p_c = a.p_b * q;
    a.pdr = 1.0 - a.p_c;
    a.e_tc = mean_collision_delay(a.p_c, lam);
    a.e_tre = a.e_s + a.e_tc;
    a.cs_prime = contention_density_dot11p(a, p);
    return a;
}

}  // namespace dsrc
