#pragma once

#include <string>
#include <vector>

#include "dsrc/scenario.hpp"

namespace dsrc {

struct SpcdcOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    double damping = 0.5;
};

/// Converged steady state of the SpCDC model: the contention-density fixed
/// point, slot-occupancy probability, delay decomposition and the PDR lower
/// bound derived from the worst-case collision analysis.
struct SpcdcAnalysis {
    double c_s = 0.0;        ///< mean contention density, packets
    double gamma = 0.0;      ///< P(slot busy | at least one contender)
    double p_ck0 = 1.0;      ///< probability of zero contenders
    double n_b = 1.0;        ///< mean packets per busy slot, in [1,2]
    double e_tdb = 0.0;      ///< busy-slot delay component, s
    double e_tdi = 0.0;      ///< idle-slot delay component, s
    double e_td = 0.0;       ///< mean channel-access delay (own transmission included), s
    double p_c_upper = 0.0;  ///< collision probability upper bound
    double pdr_lower = 1.0;  ///< 1 - p_c_upper
    double e_tc = 0.0;       ///< mean collision delay at the bound
    double e_tre = 0.0;      ///< mean reception delay, e_td + e_tc
    int iterations = 0;
    double residual = 0.0;
    bool gamma_clamped = false;  ///< drift-balance occupancy left [0,1] and was clamped
    std::vector<std::string> warnings;
};

/// Slot-occupancy probability from the drift balance:
/// gamma = lambda*N*sigma / ((1-P_ck(0)) * (n_b - lambda*N*(t_tr - sigma))),
/// clamped to [0,1] (sets *clamped). P_ck(0) is guarded away from 1 by 1e-12.
/// Throws Saturated when the denominator's drain term is not positive.
double gamma_from_state(const ScenarioParams& p, double c_s, double p_ck0, double n_b,
                        bool* clamped = nullptr);

/// Worst-case collision bound
/// (1-P_ck(0)) * (gamma + (1-gamma) * (1-(1-gamma)^c_s)^(C*(c_s+1)-1)).
double collision_upper_bound(double gamma, double c_s, double p_ck0, double c_mult);

/// Damped substitution on (c_s, p_c_upper) from c_s = 0; the converged point
/// fixes the delay decomposition and bounds. Throws NoConvergence/Saturated.
SpcdcAnalysis solve_spcdc_fixed_point(const ScenarioParams& p, const SpcdcOptions& opt = {});

/// Residual of the steady-state drift balance at a converged analysis;
/// identically ~0 unless gamma had to be clamped.
double drift_balance_residual(const ScenarioParams& p, const SpcdcAnalysis& a);

}  // namespace dsrc
