#ifndef CAULK_SVG_HPP
#define CAULK_SVG_HPP

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "caulk/common.hpp"

namespace caulk {

/// One plotted series: points, optional error bars, optional per-point
/// emphasis markers (stars for per-variant minima).
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;       // empty = no error bars
    std::vector<bool> emphasize;    // empty = none
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    // optional straight line in transformed coordinates: y* = a + b x*
    bool with_line = false;
    double line_intercept = 0.0;
    double line_slope = 0.0;
    std::string line_label;
};

namespace detail {

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
}

inline const char* series_color(std::size_t i) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return kPalette[i % 8];
}

}  // namespace detail

/// Standalone deterministic SVG line chart. No dependencies; identical input
/// yields identical bytes.
inline std::string render_svg(const PlotSpec& spec) {
    const double W = 640, H = 440, L = 72, R = 24, T = 36, B = 56;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = tx(s.x[i]);
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            double lo = s.y[i], hi = s.y[i];
            if (!s.yerr.empty()) {
                hi = s.y[i] + s.yerr[i];
                lo = spec.log_y ? std::max(s.y[i] - s.yerr[i], s.y[i] * 0.1) : s.y[i] - s.yerr[i];
            }
            ymin = std::min(ymin, ty(lo));
            ymax = std::max(ymax, ty(hi));
        }
    require(xmin <= xmax && ymin <= ymax, "svg: no data to plot");
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return L + (tx(v) - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (ty(v) - ymin) / (ymax - ymin) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << detail::px(W / 2) << "\" y=\"20\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

    // frame
    os << "<rect x=\"" << detail::px(L) << "\" y=\"" << detail::px(T) << "\" width=\""
       << detail::px(W - L - R) << "\" height=\"" << detail::px(H - T - B)
       << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    auto ticks = [&](double lo, double hi, bool log_axis) {
        std::vector<double> out;
        if (log_axis) {
            for (int e = int(std::floor(lo)); e <= int(std::ceil(hi)); ++e)
                if (e >= lo - 1e-9 && e <= hi + 1e-9) out.push_back(std::pow(10.0, e));
            if (out.size() < 2)
                for (int e = int(std::floor(lo * 2)); e <= int(std::ceil(hi * 2)); ++e)
                    out.push_back(std::pow(10.0, e / 2.0));
        } else {
            double span = hi - lo;
            double step = std::pow(10.0, std::floor(std::log10(span / 4)));
            if (span / step > 8) step *= 2;
            if (span / step > 8) step *= 2.5;
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12; v += step) out.push_back(v);
        }
        return out;
    };
    for (double v : ticks(xmin, xmax, spec.log_x)) {
        double raw = spec.log_x ? v : v;
        double xv = spec.log_x ? std::log10(v) : v;
        if (xv < xmin - 1e-9 || xv > xmax + 1e-9) continue;
        double x = L + (xv - xmin) / (xmax - xmin) * (W - L - R);
        os << "<line x1=\"" << detail::px(x) << "\" y1=\"" << detail::px(H - B) << "\" x2=\""
           << detail::px(x) << "\" y2=\"" << detail::px(H - B + 5) << "\" stroke=\"#333333\"/>\n";
        os << "<text x=\"" << detail::px(x) << "\" y=\"" << detail::px(H - B + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << detail::tick_label(raw) << "</text>\n";
    }
    for (double v : ticks(ymin, ymax, spec.log_y)) {
        double yv = spec.log_y ? std::log10(v) : v;
        if (yv < ymin - 1e-9 || yv > ymax + 1e-9) continue;
        double y = H - B - (yv - ymin) / (ymax - ymin) * (H - T - B);
        os << "<line x1=\"" << detail::px(L - 5) << "\" y1=\"" << detail::px(y) << "\" x2=\""
           << detail::px(L) << "\" y2=\"" << detail::px(y) << "\" stroke=\"#333333\"/>\n";
        os << "<text x=\"" << detail::px(L - 8) << "\" y=\"" << detail::px(y + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << detail::tick_label(v) << "</text>\n";
    }
    os << "<text x=\"" << detail::px((L + W - R) / 2) << "\" y=\"" << detail::px(H - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << spec.x_label
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << detail::px((T + H - B) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
       << detail::px((T + H - B) / 2) << ")\">" << spec.y_label << "</text>\n";

    if (spec.with_line) {
        double yl = spec.line_intercept + spec.line_slope * xmin;
        double yr = spec.line_intercept + spec.line_slope * xmax;
        auto clip01 = [&](double v) { return std::min(ymax, std::max(ymin, v)); };
        double x1 = L, x2 = W - R;
        double y1 = H - B - (clip01(yl) - ymin) / (ymax - ymin) * (H - T - B);
        double y2 = H - B - (clip01(yr) - ymin) / (ymax - ymin) * (H - T - B);
        os << "<line x1=\"" << detail::px(x1) << "\" y1=\"" << detail::px(y1) << "\" x2=\""
           << detail::px(x2) << "\" y2=\"" << detail::px(y2)
           << "\" stroke=\"#999999\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const char* color = detail::series_color(si);
        if (!s.yerr.empty()) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (s.yerr[i] <= 0.0) continue;
                double lo = s.y[i] - s.yerr[i];
                if (spec.log_y) lo = std::max(lo, s.y[i] * 0.1);
                double x = sx(s.x[i]), y1 = sy(lo), y2 = sy(s.y[i] + s.yerr[i]);
                os << "<line x1=\"" << detail::px(x) << "\" y1=\"" << detail::px(y1) << "\" x2=\""
                   << detail::px(x) << "\" y2=\"" << detail::px(y2) << "\" stroke=\"" << color
                   << "\"/>\n";
                os << "<line x1=\"" << detail::px(x - 3) << "\" y1=\"" << detail::px(y1) << "\" x2=\""
                   << detail::px(x + 3) << "\" y2=\"" << detail::px(y1) << "\" stroke=\"" << color
                   << "\"/>\n";
                os << "<line x1=\"" << detail::px(x - 3) << "\" y1=\"" << detail::px(y2) << "\" x2=\""
                   << detail::px(x + 3) << "\" y2=\"" << detail::px(y2) << "\" stroke=\"" << color
                   << "\"/>\n";
            }
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << (i ? " " : "") << detail::px(sx(s.x[i])) << "," << detail::px(sy(s.y[i]));
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << "<circle cx=\"" << detail::px(sx(s.x[i])) << "\" cy=\"" << detail::px(sy(s.y[i]))
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            if (!s.emphasize.empty() && s.emphasize[i]) {
                double x = sx(s.x[i]), y = sy(s.y[i]);
                os << "<path d=\"M " << detail::px(x) << " " << detail::px(y - 9) << " L "
                   << detail::px(x + 2.6) << " " << detail::px(y - 3.6) << " L " << detail::px(x + 8.6)
                   << " " << detail::px(y - 2.8) << " L " << detail::px(x + 4.3) << " "
                   << detail::px(y + 1.4) << " L " << detail::px(x + 5.3) << " " << detail::px(y + 7.3)
                   << " L " << detail::px(x) << " " << detail::px(y + 4.5) << " L "
                   << detail::px(x - 5.3) << " " << detail::px(y + 7.3) << " L " << detail::px(x - 4.3)
                   << " " << detail::px(y + 1.4) << " L " << detail::px(x - 8.6) << " "
                   << detail::px(y - 2.8) << " L " << detail::px(x - 2.6) << " " << detail::px(y - 3.6)
                   << " Z\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"/>\n";
            }
        }
    }

    double ly = T + 14;
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        os << "<line x1=\"" << detail::px(W - R - 150) << "\" y1=\"" << detail::px(ly - 4)
           << "\" x2=\"" << detail::px(W - R - 126) << "\" y2=\"" << detail::px(ly - 4)
           << "\" stroke=\"" << detail::series_color(si) << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << detail::px(W - R - 120) << "\" y=\"" << detail::px(ly)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << spec.series[si].label
           << "</text>\n";
        ly += 16;
    }
    if (spec.with_line && !spec.line_label.empty()) {
        os << "<line x1=\"" << detail::px(W - R - 150) << "\" y1=\"" << detail::px(ly - 4)
           << "\" x2=\"" << detail::px(W - R - 126) << "\" y2=\"" << detail::px(ly - 4)
           << "\" stroke=\"#999999\" stroke-dasharray=\"6,4\"/>\n";
        os << "<text x=\"" << detail::px(W - R - 120) << "\" y=\"" << detail::px(ly)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << spec.line_label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace caulk

#endif  // CAULK_SVG_HPP
