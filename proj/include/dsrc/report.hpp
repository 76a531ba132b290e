#pragma once

#include <string>
#include <vector>

#include "dsrc/results.hpp"

namespace dsrc {

/// Pass/fail thresholds for the comparison report. Every check is evaluated
/// from the table itself; there is no unconditional pass path.
struct ReportThresholds {
    double pdr_agreement = 0.03;     ///< |analytic - sim| PDR, dot11p
    double delay_rel = 0.10;         ///< relative mean-delay residual, both models
    double spcdc_pdr_gain = 0.10;    ///< sim spcdc PDR - sim dot11p PDR at the heavy point
    double reception_ratio = 0.5;    ///< spcdc / dot11p(cw128) reception delay at the heavy point
    double density_gap_lo = 5.0;     ///< dot11p(cw128) - spcdc contention density at the heavy point
    double density_gap_hi = 9.0;
};

struct ReportOutcome {
    std::string text;
    bool all_passed = true;  ///< SKIPPED sections do not fail
};

/// Per-grid-point policy deltas, analytic-vs-simulation residuals,
/// bound-violation checks and threshold verdicts. The heavy-load point is the
/// (case, N) with the lowest simulated dot11p PDR. Throws IncomparableTable
/// when a comparison is requested between policies whose grids do not align.
ReportOutcome compare_report(const std::vector<ResultRow>& rows,
                             const ReportThresholds& thr = {});

}  // namespace dsrc
