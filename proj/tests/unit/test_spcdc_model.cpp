#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsrc/errors.hpp"
#include "dsrc/rng.hpp"
#include "dsrc/scenario.hpp"
#include "dsrc/spcdc_model.hpp"

using namespace dsrc;

namespace {

ScenarioParams heavy_case(int n) {
    ScenarioParams p;
    p.data_rate = 6e6;
    p.lambda = 10;
    p.payload_bytes = 200;
    p.spcdc_c = 3;
    p.n_vehicles = n;
    return p;
}

// Binomial pmf by the multiplicative recurrence; stable for n <= a few hundred.
std::vector<double> binomial_pmf(int n, double prob) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    double v = std::pow(1.0 - prob, n);
    pmf[0] = v;
    for (int j = 1; j <= n; ++j) {
        v *= static_cast<double>(n - j + 1) / static_cast<double>(j) * prob / (1.0 - prob);
        pmf[static_cast<std::size_t>(j)] = v;
    }
    return pmf;
}

}  // namespace

TEST_CASE("slot occupancy matches the hand-evaluated drift balance") {
    ScenarioParams p = heavy_case(10);
    const auto tm = derive_timing(p);
    // lambda=10, N=10, sigma=16us, n_b=1, P_ck(0)=0.9
    const double want = (10.0 * 10.0 * 16e-6) /
                        (0.1 * (1.0 - 10.0 * 10.0 * (tm.t_tr - 16e-6)));
    bool clamped = true;
    const double got = gamma_from_state(p, 0.1, 0.9, 1.0, &clamped);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(!clamped);
    CHECK(got == doctest::Approx(0.016579).epsilon(1e-4));
}

TEST_CASE("slot occupancy clamps and flags at vanishing contention") {
    ScenarioParams p = heavy_case(10);
    bool clamped = false;
    const double got = gamma_from_state(p, 0.0, 1.0, 1.0, &clamped);
    CHECK(got == 1.0);
    CHECK(clamped);
}

TEST_CASE("slot occupancy vanishes with the generation rate") {
    ScenarioParams p = heavy_case(10);
    p.lambda = 1e-3;
    const double got = gamma_from_state(p, 0.1, 0.9, 1.0);
    CHECK(got < 1e-4);
}

TEST_CASE("saturation is detected when the channel cannot drain the load") {
    ScenarioParams p = heavy_case(2000);
    CHECK_THROWS_AS(gamma_from_state(p, 1.0, 0.5, 1.0), Saturated);
}

TEST_CASE("collision upper bound closed form") {
    CHECK(collision_upper_bound(0.3, 2.0, 1.0, 3.0) == 0.0);
    CHECK(collision_upper_bound(0.0, 2.0, 0.5, 3.0) == 0.0);
    const double want =
        0.5 * (0.1 + 0.9 * std::pow(1.0 - std::pow(0.9, 2.0), 3.0 * 3.0 - 1.0));
    CHECK(collision_upper_bound(0.1, 2.0, 0.5, 3.0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(collision_upper_bound(0.1, 2.0, 0.5, 3.0) ==
          doctest::Approx(0.0500008).epsilon(1e-4));
}

TEST_CASE("collision upper bound agrees with a log-domain re-evaluation") {
    SplitMix64 g(555);
    for (int i = 0; i < 10; ++i) {
        const double gamma = 0.01 + 0.8 * g.uniform01();
        const double cs = 5.0 * g.uniform01();
        const double p0 = g.uniform01();
        const double c = 1.0 + 4.0 * g.uniform01();
        const double tail = c * (cs + 1.0) - 1.0;
        const double per_slot = -std::expm1(cs * std::log1p(-gamma));
        const double want =
            (1.0 - p0) * (gamma + (1.0 - gamma) * std::exp(tail * std::log(per_slot)));
        CHECK(collision_upper_bound(gamma, cs, p0, c) ==
              doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("single vehicle degenerates to one transmission plus C idle slots") {
    ScenarioParams p = heavy_case(1);
    const auto tm = derive_timing(p);
    const auto a = solve_spcdc_fixed_point(p);
    CHECK(a.c_s == 0.0);
    CHECK(a.p_ck0 == 1.0);
    CHECK(a.e_tdb == doctest::Approx(tm.t_tr).epsilon(1e-15));
    CHECK(a.e_tdi == doctest::Approx(3.0 * p.slot).epsilon(1e-15));
    CHECK(a.p_c_upper == 0.0);
    CHECK(a.pdr_lower == 1.0);
    CHECK(a.e_tre == doctest::Approx(a.e_td).epsilon(1e-15));
}

TEST_CASE("converged state satisfies the model identities") {
    for (const int n : {10, 50, 120, 200}) {
        const ScenarioParams p = heavy_case(n);
        const auto a = solve_spcdc_fixed_point(p);
        CHECK(a.e_td == doctest::Approx(a.e_tdb + a.e_tdi).epsilon(1e-15));
        CHECK(a.pdr_lower == doctest::Approx(1.0 - a.p_c_upper).epsilon(1e-15));
        CHECK(a.e_tre == doctest::Approx(a.e_td + a.e_tc).epsilon(1e-15));
        // self-consistency of the contention-density balance
        CHECK(a.c_s ==
              doctest::Approx(p.lambda * (n - 1) * a.e_td).epsilon(1e-6));
        CHECK(a.p_ck0 ==
              doctest::Approx(std::pow(1.0 - a.c_s / (n - 1), n - 1)).epsilon(1e-12));
        CHECK(a.gamma >= 0.0);
        CHECK(a.gamma <= 1.0);
        CHECK(a.n_b >= 1.0);
        CHECK(a.n_b <= 2.0);
        CHECK(a.c_s >= 0.0);
        CHECK(a.e_tdi >= 0.0);
        // drift balance residual at the converged point
        const double resid = drift_balance_residual(p, a);
        CHECK(std::abs(resid) < 1e-9 * std::max(1.0, p.lambda * n * derive_timing(p).t_tr));
    }
}

TEST_CASE("busy-slot delay closed form equals the binomial direct summation") {
    for (const int n : {10, 80, 200}) {
        const ScenarioParams p = heavy_case(n);
        const auto tm = derive_timing(p);
        const auto a = solve_spcdc_fixed_point(p);
        const auto pmf = binomial_pmf(n - 1, a.c_s / (n - 1));
        CHECK(pmf[0] == doctest::Approx(a.p_ck0).epsilon(1e-9));
        double direct = 1.0;  // own transmission
        for (int j = 1; j <= n - 1; ++j) {
            direct += pmf[static_cast<std::size_t>(j)] * (j - 0.5);
        }
        CHECK(direct * tm.t_tr == doctest::Approx(a.e_tdb).epsilon(1e-9));
    }
}

TEST_CASE("minimum multiplier keeps the idle component positive") {
    ScenarioParams p = heavy_case(100);
    p.spcdc_c = 1;
    const auto a = solve_spcdc_fixed_point(p);
    CHECK(a.e_tdi > 0.0);
    p.spcdc_c = 0.5;
    CHECK_THROWS_AS(solve_spcdc_fixed_point(p), InvalidParams);
}
