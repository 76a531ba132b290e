#include "dsrc/spcdc_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dsrc/dot11p_model.hpp"
#include "dsrc/errors.hpp"

namespace dsrc {

namespace {

constexpr double kPck0Guard = 1e-12;  // keeps the occupancy denominator finite at c_s = 0

double zero_contender_probability(double c_s, int n) {
    if (n <= 1) return 1.0;
    const double base = std::clamp(1.0 - c_s / static_cast<double>(n - 1), 0.0, 1.0);
    return std::pow(base, n - 1);
}

double gamma_value(double lambda, int n, double sigma, double ttr, double p_ck0, double n_b,
                   bool* clamped) {
    const double drain = n_b - lambda * n * (ttr - sigma);
    if (!(drain > 0)) {
        std::ostringstream msg;
        msg << "channel cannot drain the offered load: n_b = " << n_b
            << " <= lambda*N*(t_tr - sigma) = " << lambda * n * (ttr - sigma);
        throw Saturated(msg.str());
    }
    const double guarded = std::min(p_ck0, 1.0 - kPck0Guard);
    const double g = lambda * n * sigma / ((1.0 - guarded) * drain);
    if (clamped) *clamped = (g < 0.0 || g > 1.0);
    return std::clamp(g, 0.0, 1.0);
}

}  // namespace

double gamma_from_state(const ScenarioParams& p, double c_s, double p_ck0, double n_b,
                        bool* clamped) {
    (void)c_s;
    const DerivedTiming tm = derive_timing(p);
    return gamma_value(p.lambda, p.n_vehicles, p.slot, tm.t_tr, p_ck0, n_b, clamped);
}

double collision_upper_bound(double gamma, double c_s, double p_ck0, double c_mult) {
    const double tail_slots = c_mult * (c_s + 1.0) - 1.0;
    const double per_slot = 1.0 - std::pow(1.0 - gamma, c_s);
    return (1.0 - p_ck0) * (gamma + (1.0 - gamma) * std::pow(per_slot, tail_slots));
}

SpcdcAnalysis solve_spcdc_fixed_point(const ScenarioParams& p, const SpcdcOptions& opt) {
    validate(p);
    if (!(opt.tol > 0)) throw InvalidParams("tol", "tol must be > 0");
    if (opt.max_iter < 1) throw InvalidParams("max_iter", "max_iter must be >= 1");
    if (!(opt.damping > 0 && opt.damping <= 1)) {
        throw InvalidParams("damping", "damping must lie in (0,1]");
    }

    const DerivedTiming tm = derive_timing(p);
    const double ttr = tm.t_tr;
    const double sigma = p.slot;
    const double lam = p.lambda;
    const double c_mult = p.spcdc_c;
    const int n = p.n_vehicles;

    SpcdcAnalysis a;
    if (n == 1) {
        // No contention: one own transmission plus C idle slots.
        a.c_s = 0.0;
        a.p_ck0 = 1.0;
        a.gamma = 0.0;
        a.n_b = 1.0;
        a.e_tdb = ttr;
        a.e_tdi = c_mult * sigma;
        a.e_td = a.e_tdb + a.e_tdi;
        a.p_c_upper = 0.0;
        a.pdr_lower = 1.0;
        a.e_tc = 0.0;
        a.e_tre = a.e_td;
        return a;
    }

    double cs = 0.0, pcu = 0.0;
    double resid = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < opt.max_iter) {
        ++it;
        const double pck0 = zero_contender_probability(cs, n);
        const double nb = 1.0 + pcu;
        const double g = gamma_value(lam, n, sigma, ttr, pck0, nb, nullptr);
        const double etdb = (cs + 0.5 * (1.0 + pck0)) * ttr;
        const double etdi = (c_mult * (cs + 1.0) - cs) * sigma;
        const double etd = etdb + etdi;
        const double cs_cand = lam * (n - 1) * etd;
        const double pcu_cand = collision_upper_bound(g, cs, pck0, c_mult);
        resid = std::max(std::abs(cs_cand - cs), std::abs(pcu_cand - pcu));
        cs += opt.damping * (cs_cand - cs);
        pcu += opt.damping * (pcu_cand - pcu);
        if (resid < opt.tol) break;
    }
    if (!(resid < opt.tol)) {
        std::ostringstream msg;
        msg << "spcdc fixed point did not converge: residual " << resid << " after " << it
            << " iterations (c_s=" << cs << ", p_c_upper=" << pcu << ")";
        throw NoConvergence(msg.str(), resid, it);
    }

    a.iterations = it;
    a.residual = resid;
    a.c_s = cs;
    a.p_ck0 = zero_contender_probability(cs, n);
    a.n_b = 1.0 + pcu;
    a.gamma = gamma_value(lam, n, sigma, ttr, a.p_ck0, a.n_b, &a.gamma_clamped);
    if (a.gamma_clamped) {
        a.warnings.push_back("slot occupancy left [0,1] and was clamped; "
                             "drift balance is not exactly satisfied at this point");
    }
    a.e_tdb = (cs + 0.5 * (1.0 + a.p_ck0)) * ttr;
    a.e_tdi = (c_mult * (cs + 1.0) - cs) * sigma;
    a.e_td = a.e_tdb + a.e_tdi;
    if (lam * a.e_td >= 1.0) {
        a.warnings.push_back("per-packet delay reaches the generation period; "
                             "steady state is questionable at this load");
    }
    a.p_c_upper = collision_upper_bound(a.gamma, cs, a.p_ck0, c_mult);
    a.pdr_lower = 1.0 - a.p_c_upper;
    a.e_tc = mean_collision_delay(a.p_c_upper, lam);
    a.e_tre = a.e_td + a.e_tc;
    return a;
}

double drift_balance_residual(const ScenarioParams& p, const SpcdcAnalysis& a) {
    const DerivedTiming tm = derive_timing(p);
    const double lam_n = p.lambda * p.n_vehicles;
    const double p_idle = a.p_ck0 + (1.0 - a.p_ck0) * (1.0 - a.gamma);
    const double p_busy = (1.0 - a.p_ck0) * a.gamma;
    return lam_n * p.slot * p_idle + (lam_n * tm.t_tr - a.n_b) * p_busy;
}

}  // namespace dsrc
