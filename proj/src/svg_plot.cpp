#include "dsrc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace dsrc {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginL = 70, kMarginR = 230, kMarginT = 40, kMarginB = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

std::string num(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(2);
    out << v;
    return out.str();
}

std::string tick_label(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& pt : s.points) {
            const double lo = pt[1] - pt[2], hi = pt[1] + pt[2];
            if (!any) {
                xmin = xmax = pt[0];
                ymin = lo;
                ymax = hi;
                any = true;
            } else {
                xmin = std::min(xmin, pt[0]);
                xmax = std::max(xmax, pt[0]);
                ymin = std::min(ymin, lo);
                ymax = std::max(ymax, hi);
            }
        }
    }
    if (!any) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 1;
        xmax += 1;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 1;
        ymax += 1;
    }
    // pad the y range a little so curves do not sit on the frame
    const double ypad = (ymax - ymin) * 0.05;
    ymin -= ypad;
    ymax += ypad;

    const double px = kWidth - kMarginL - kMarginR;
    const double py = kHeight - kMarginT - kMarginB;
    auto X = [&](double x) { return kMarginL + (x - xmin) / (xmax - xmin) * px; };
    auto Y = [&](double y) { return kHeight - kMarginB - (y - ymin) / (ymax - ymin) * py; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kMarginL << "\" y=\"24\" font-size=\"16\" font-family=\"sans-serif\">"
        << escape(title) << "</text>\n";

    // frame
    svg << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << num(px)
        << "\" height=\"" << num(py) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // ticks
    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / nticks;
        const double fy = ymin + (ymax - ymin) * i / nticks;
        svg << "<line x1=\"" << num(X(fx)) << "\" y1=\"" << kHeight - kMarginB << "\" x2=\""
            << num(X(fx)) << "\" y2=\"" << kHeight - kMarginB + 5 << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << num(X(fx)) << "\" y=\"" << kHeight - kMarginB + 18
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\">"
            << tick_label(fx) << "</text>\n";
        svg << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << num(Y(fy)) << "\" x2=\"" << kMarginL
            << "\" y2=\"" << num(Y(fy)) << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << kMarginL - 8 << "\" y=\"" << num(Y(fy) + 4)
            << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << tick_label(fy) << "</text>\n";
    }
    svg << "<text x=\"" << kMarginL + px / 2 << "\" y=\"" << kHeight - 12
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">"
        << escape(xlabel) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << kMarginT + py / 2
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 "
        << kMarginT + py / 2 << ")\">" << escape(ylabel) << "</text>\n";

    // series
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        if (s.line && s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& pt : s.points) svg << num(X(pt[0])) << ',' << num(Y(pt[1])) << ' ';
            svg << "\"/>\n";
        }
        for (const auto& pt : s.points) {
            if (pt[2] > 0) {  // CI whisker
                svg << "<line x1=\"" << num(X(pt[0])) << "\" y1=\"" << num(Y(pt[1] - pt[2]))
                    << "\" x2=\"" << num(X(pt[0])) << "\" y2=\"" << num(Y(pt[1] + pt[2]))
                    << "\" stroke=\"" << color << "\"/>\n";
                svg << "<line x1=\"" << num(X(pt[0]) - 3) << "\" y1=\"" << num(Y(pt[1] - pt[2]))
                    << "\" x2=\"" << num(X(pt[0]) + 3) << "\" y2=\"" << num(Y(pt[1] - pt[2]))
                    << "\" stroke=\"" << color << "\"/>\n";
                svg << "<line x1=\"" << num(X(pt[0]) - 3) << "\" y1=\"" << num(Y(pt[1] + pt[2]))
                    << "\" x2=\"" << num(X(pt[0]) + 3) << "\" y2=\"" << num(Y(pt[1] + pt[2]))
                    << "\" stroke=\"" << color << "\"/>\n";
            }
            if (!s.line) {
                svg << "<circle cx=\"" << num(X(pt[0])) << "\" cy=\"" << num(Y(pt[1]))
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        }
        // legend
        const double ly = kMarginT + 14 + 16 * static_cast<double>(i);
        const double lx = kWidth - kMarginR + 12;
        if (s.line) {
            svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
                << num(lx + 18) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        } else {
            svg << "<circle cx=\"" << num(lx + 9) << "\" cy=\"" << num(ly - 4)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        svg << "<text x=\"" << num(lx + 24) << "\" y=\"" << num(ly)
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape(s.label)
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << svg.str();
}

std::vector<std::string> render_plots(const std::vector<ResultRow>& rows,
                                      const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    struct Metric {
        const char* file;
        const char* title;
        const char* ylabel;
        double ResultRow::*field;
    };
    const Metric metrics[] = {
        {"pdr_vs_n.svg", "Packet delivery ratio", "PDR", &ResultRow::pdr},
        {"delay_vs_n.svg", "Mean delay", "mean delay [s]", &ResultRow::mean_delay_s},
        {"reception_delay_vs_n.svg", "Mean reception delay", "mean reception delay [s]",
         &ResultRow::mean_reception_delay_s},
        {"contention_density_vs_n.svg", "Contention density", "contention density [packets]",
         &ResultRow::contention_density},
    };

    std::vector<std::string> files;
    for (const auto& metric : metrics) {
        // one series per (case, policy, source), rows already sorted by N
        std::map<std::string, PlotSeries> by_key;
        for (const auto& r : rows) {
            if (!r.error.empty()) continue;
            const std::string key = r.case_id + "/" + r.policy + "/" + r.source;
            auto& s = by_key[key];
            s.label = key;
            s.line = r.source == "analytic";
            const double ci =
                (metric.field == &ResultRow::pdr && r.pdr_ci) ? *r.pdr_ci : 0.0;
            s.points.push_back({static_cast<double>(r.n_vehicles), r.*metric.field, ci});
        }
        std::vector<PlotSeries> series;
        for (auto& [key, s] : by_key) {
            std::sort(s.points.begin(), s.points.end(),
                      [](const auto& a, const auto& b) { return a[0] < b[0]; });
            series.push_back(std::move(s));
        }
        const std::string path = out_dir + "/" + metric.file;
        write_svg_plot(path, metric.title, "number of vehicles", metric.ylabel, series);
        files.push_back(path);
    }
    return files;
}

}  // namespace dsrc
