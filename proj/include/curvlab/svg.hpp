#pragma once

#include <string>
#include <vector>

namespace curvlab::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone SVG line plot with axes, ticks and a legend. log_y plots log10|y|.
std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, bool log_y = false);

} // namespace curvlab::svg
