#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "motormap/matrix.hpp"

namespace motormap {

/// Fixed anchor table of the continuous color ramp (viridis-like, documented
/// in the README). Values are linearly interpolated between anchors.
struct RampAnchor {
    double t;
    int r, g, b;
};
const std::array<RampAnchor, 5>& color_ramp_anchors();

std::string ramp_color(double t); // t in [0,1] -> "#rrggbb"

struct PlotOptions {
    int width = 800;
    int height = 600;
    double point_radius = 3.0;
    std::string title;
    // either a continuous value per point, or categorical labels; empty = flat color
    std::vector<double> color_values;
    std::vector<std::size_t> cluster_labels;
    std::string color_name; // legend caption
};

/// Standalone scatter SVG: one circle per point, linear viewport mapping with
/// 5% margins, no axes. Output bytes are a pure function of the inputs.
std::string render_scatter_svg(const Matrix& points2d, const PlotOptions& opts);

void write_text_file(const std::string& path, const std::string& content);

} // namespace motormap
