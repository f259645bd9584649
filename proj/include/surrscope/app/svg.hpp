#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surrscope/blackbox/meshgrid.hpp"

namespace surrscope::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    /// Shaded band drawn under the line when both are set.
    std::vector<double> lower;
    std::vector<double> upper;
    bool markers = false;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::optional<double> y_min;
    std::optional<double> y_max;
};

/// Panel of `width` x `height` pixels, as a <g> fragment at (0, 0).
std::string line_panel(const Axes& axes, const std::vector<Series>& series, double width, double height);

std::string bar_panel(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, double width, double height);

/// Black-box labels as background cells, the surrogate's labels (same grid)
/// as an outlined overlay, and the explained instance with its ball.
std::string heatmap_panel(const std::string& title, const EvalGrid& grid, const BinaryLabels* overlay,
                          const std::vector<double>& instance, double radius, double width, double height);

/// Stacks panels vertically into one standalone document.
std::string document(const std::vector<std::string>& panels, double width, double panel_height);

} // namespace surrscope::svg
