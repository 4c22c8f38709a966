#include "mfgfn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mfgfn/errors.hpp"

namespace mfgfn {

namespace {

constexpr int kWidth = 820;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;  // room for the legend
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    if (!(hi > lo)) {
        ticks.push_back(lo);
        return ticks;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
    return ticks;
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const std::string& title, const std::string& x_label,
                             const std::string& y_label, bool log_x) {
    if (series.empty()) throw MissingDataError("render_line_plot: no series");

    bool use_log = log_x;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t points = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw MissingDataError("render_line_plot: x/y size mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= 0.0) use_log = false;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
            ++points;
        }
    }
    if (points == 0) throw MissingDataError("render_line_plot: series are empty");
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double txmin = use_log ? std::log10(xmin) : xmin;
    const double txmax = use_log ? std::log10(xmax) : xmax;
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto sx = [&](double x) {
        const double t = use_log ? std::log10(x) : x;
        const double denom = txmax > txmin ? txmax - txmin : 1.0;
        return kMarginLeft + (t - txmin) / denom * plot_w;
    };
    const auto sy = [&](double y) {
        return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h;
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"24\" " +
           "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape_xml(title) + "</text>\n";

    // Axes
    out += "<rect x=\"" + fmt(kMarginLeft) + "\" y=\"" + fmt(kMarginTop) +
           "\" width=\"" + fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks
    std::vector<double> xticks;
    if (use_log) {
        for (int e = static_cast<int>(std::floor(txmin));
             e <= static_cast<int>(std::ceil(txmax)); ++e) {
            const double v = std::pow(10.0, e);
            if (v >= xmin * (1 - 1e-12) && v <= xmax * (1 + 1e-12)) xticks.push_back(v);
        }
        if (xticks.empty()) xticks = {xmin, xmax};
    } else {
        xticks = nice_ticks(xmin, xmax, 6);
    }
    for (double t : xticks) {
        const double px = sx(t);
        out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kMarginTop + plot_h) +
               "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(kMarginTop + plot_h + 5) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kMarginTop + plot_h + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(t) + "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax, 6)) {
        const double py = sy(t);
        out += "<line x1=\"" + fmt(kMarginLeft - 5) + "\" y1=\"" + fmt(py) +
               "\" x2=\"" + fmt(kMarginLeft) + "\" y2=\"" + fmt(py) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(kMarginLeft - 9) + "\" y=\"" + fmt(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(t) + "</text>\n";
    }
    out += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"" +
           fmt(kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape_xml(x_label) + (use_log ? " (log scale)" : "") + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt(kMarginTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" " +
           "transform=\"rotate(-90 18 " + fmt(kMarginTop + plot_h / 2) + ")\">" +
           escape_xml(y_label) + "</text>\n";

    // Series
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.x.size() > 1) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) pts += " ";
                pts += fmt(sx(s.x[i])) + "," + fmt(sy(s.y[i]));
            }
            out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.8\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += "<circle cx=\"" + fmt(sx(s.x[i])) + "\" cy=\"" + fmt(sy(s.y[i])) +
                   "\" r=\"2.6\" fill=\"" + color + "\"/>\n";
        }
        // Legend entry
        const double ly = kMarginTop + 14.0 + 18.0 * si;
        const double lx = kWidth - kMarginRight + 14.0;
        out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(lx + 22) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"1.8\"/>\n";
        out += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" +
               escape_xml(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace mfgfn
