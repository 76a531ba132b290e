#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dsrc {

/// Compensated accumulator; keeps merges insensitive to magnitude spread.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const noexcept { return s_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

/// Welford running mean/variance.
struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance_sample() const noexcept {
        return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    }
    double stddev() const noexcept { return std::sqrt(variance_sample()); }
};

/// Two-sided 99% Student-t quantile (0.995 upper point) for `df` degrees of
/// freedom. Table-based; steps down to the nearest tabulated df.
double student_t_995(int df);

struct Estimate {
    double mean = 0.0;
    double ci99 = 0.0;  ///< half-width; 0 when fewer than 2 samples
};

/// mean +- t_{n-1,0.995} * s / sqrt(n) over the samples, in index order.
Estimate estimate99(const std::vector<double>& xs);

}  // namespace dsrc
