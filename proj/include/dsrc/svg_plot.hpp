#pragma once

#include <array>
#include <string>
#include <vector>

#include "dsrc/results.hpp"

namespace dsrc {

/// A curve or a scatter on one plot. Points are (x, y, ci); ci = 0 draws no
/// whisker. `line` connects the points, otherwise markers only.
struct PlotSeries {
    std::string label;
    std::vector<std::array<double, 3>> points;
    bool line = true;
};

/// Hand-emitted SVG: fixed layout, axes from data extents, no timestamps —
/// byte-identical output for identical input.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series);

/// One SVG per metric (pdr, mean delay, reception delay, contention density)
/// vs N, one series per (case, policy, source); analytic rows as lines,
/// simulation rows as markers with CI whiskers. Returns the file paths.
std::vector<std::string> render_plots(const std::vector<ResultRow>& rows,
                                      const std::string& out_dir);

}  // namespace dsrc
