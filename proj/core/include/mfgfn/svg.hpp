#pragma once

#include <string>
#include <vector>

namespace mfgfn {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Render a line plot as standalone SVG text. Output bytes are a pure
/// function of the inputs (no timestamps, fixed formatting), so repeated
/// invocations on the same data are byte-identical. log_x falls back to a
/// linear axis when any x <= 0.
std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const std::string& title, const std::string& x_label,
                             const std::string& y_label, bool log_x);

}  // namespace mfgfn
