#pragma once

#include <string>
#include <vector>

#include "dsrc/scenario.hpp"

namespace dsrc {

struct Dot11pOptions {
    double tol = 1e-10;   ///< stop when the residual of (rho, p_b, p_c) drops below this
    int max_iter = 100000;
    double damping = 0.5; ///< damped simultaneous substitution step
};

/// Converged fixed point of the periodic-broadcast DCF model, plus every
/// closed-form quantity derived from it. All probabilities live in [0,1];
/// delays are seconds.
struct Dot11pAnalysis {
    double rho = 0.0;      ///< buffer-occupancy probability, lambda * E[S]
    double p_b = 0.0;      ///< channel busy at packet arrival
    double p_c = 0.0;      ///< collision probability
    double pdr = 1.0;      ///< 1 - p_c
    double pi0 = 0.0;      ///< per-slot transmit-attempt probability, 2/(1+CW)
    std::vector<double> pi_m;  ///< stationary backoff-counter distribution
    double n_c = 2.0;      ///< packets involved in a collision (pairwise assumption)
    double e_m = 0.0;      ///< mean initial backoff counter, (CW-1)/2
    double e_ti = 0.0;     ///< mean per-slot interruption
    double e_tb = 0.0;     ///< mean backoff duration
    double e_tres = 0.0;   ///< mean residual transmission seen by a deferred arrival
    double e_ta = 0.0;     ///< mean access delay
    double e_s = 0.0;      ///< mean service time = mean end-to-end delay (queueing delay is 0)
    double e_tc = 0.0;     ///< mean collision delay
    double e_tre = 0.0;    ///< mean reception delay
    double cs_prime = 0.0; ///< mean contention density
    int iterations = 0;
    double residual = 0.0;
    bool pb_clamped = false;  ///< busy-probability linearization exceeded 1 and was clamped
    std::vector<std::string> warnings;
};

/// Probability the backoff counter sits at zero: 2/(1+cw). Requires cw >= 1.
double pi0(int cw);

/// Stationary distribution of the backoff counter; element m equals
/// (cw-m)/cw * pi0(cw) and the vector sums to 1.
std::vector<double> stationary_backoff_distribution(int cw);

/// Geometric retry penalty p_c / ((1-p_c) * lambda). Requires p_c in [0,1);
/// throws std::domain_error at p_c == 1.
double mean_collision_delay(double p_c, double lambda);

/// Mean contention density (CW-1)(1-(1-rho*pi0)^(N-1))/2 at a converged state.
double contention_density_dot11p(const Dot11pAnalysis& a, const ScenarioParams& p);

/// Solves the coupled system {rho, p_b, p_c} by damped simultaneous
/// substitution from rho = p_c = 0, then fills in the full delay
/// decomposition from the converged point. Throws NoConvergence or
/// Infeasible (converged rho > 1).
Dot11pAnalysis solve_fixed_point(const ScenarioParams& p, const Dot11pOptions& opt = {});

}  // namespace dsrc
