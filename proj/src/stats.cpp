#include "dsrc/stats.hpp"

#include <utility>

namespace dsrc {

namespace {

// Two-sided 99% Student-t quantiles (upper 0.995 point).
constexpr std::pair<int, double> kT995[] = {
    {1, 63.657}, {2, 9.925},  {3, 5.841},  {4, 4.604},  {5, 4.032},  {6, 3.707},
    {7, 3.499},  {8, 3.355},  {9, 3.250},  {10, 3.169}, {11, 3.106}, {12, 3.055},
    {13, 3.012}, {14, 2.977}, {15, 2.947}, {16, 2.921}, {17, 2.898}, {18, 2.878},
    {19, 2.861}, {20, 2.845}, {21, 2.831}, {22, 2.819}, {23, 2.807}, {24, 2.797},
    {25, 2.787}, {26, 2.779}, {27, 2.771}, {28, 2.763}, {29, 2.756}, {30, 2.750},
    {40, 2.704}, {60, 2.660}, {120, 2.617},
};
constexpr double kZ995 = 2.576;

}  // namespace

double student_t_995(int df) {
    if (df < 1) df = 1;
    double best = kZ995;
    for (const auto& [d, t] : kT995) {
        if (d <= df) best = t;  // step down to the nearest tabulated df
        else break;
    }
    return df > 120 ? kZ995 : best;
}

Estimate estimate99(const std::vector<double>& xs) {
    MeanVar mv;
    for (const double x : xs) mv.add(x);
    Estimate e;
    e.mean = mv.mean;
    if (mv.n > 1) {
        e.ci99 = student_t_995(static_cast<int>(mv.n) - 1) * mv.stddev() /
                 std::sqrt(static_cast<double>(mv.n));
    }
    return e;
}

}  // namespace dsrc
