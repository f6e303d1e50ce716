#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hornopt::svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static line plot: auto-scaled axes, ticks, optional dashed
/// horizontal guide lines (used for the control bounds), legend.
struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> guide_lines;  // y positions, dashed

    void write(const std::filesystem::path& path) const;
};

}  // namespace hornopt::svg
