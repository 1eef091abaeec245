#include "motormap/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace motormap {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string rgb(int r, int g, int b) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace

const std::array<RampAnchor, 5>& color_ramp_anchors() {
    static const std::array<RampAnchor, 5> anchors = {{
        {0.00, 68, 1, 84},
        {0.25, 59, 82, 139},
        {0.50, 33, 145, 140},
        {0.75, 94, 201, 98},
        {1.00, 253, 231, 37},
    }};
    return anchors;
}

std::string ramp_color(double t) {
    const auto& a = color_ramp_anchors();
    t = std::clamp(t, 0.0, 1.0);
    std::size_t hi = 1;
    while (hi + 1 < a.size() && t > a[hi].t) ++hi;
    const RampAnchor& lo_a = a[hi - 1];
    const RampAnchor& hi_a = a[hi];
    const double f = (t - lo_a.t) / (hi_a.t - lo_a.t);
    auto lerp = [&](int x, int y) { return static_cast<int>(std::lround(x + f * (y - x))); };
    return rgb(lerp(lo_a.r, hi_a.r), lerp(lo_a.g, hi_a.g), lerp(lo_a.b, hi_a.b));
}

std::string render_scatter_svg(const Matrix& points2d, const PlotOptions& opts) {
    const std::size_t n = points2d.rows();
    if (points2d.cols() != 2)
        raise(errc::not_two_dimensional,
              "scatter plot needs 2-D points, got " + std::to_string(points2d.cols()) + " columns");
    if (!opts.color_values.empty() && opts.color_values.size() != n)
        raise(errc::dimension_mismatch, "color values do not match point count");
    if (!opts.cluster_labels.empty() && opts.cluster_labels.size() != n)
        raise(errc::dimension_mismatch, "cluster labels do not match point count");

    const double w = opts.width, h = opts.height;
    const double mx = 0.05 * w, my = 0.05 * h;

    double xmin = points2d(0, 0), xmax = xmin, ymin = points2d(0, 1), ymax = ymin;
    for (std::size_t i = 1; i < n; ++i) {
        xmin = std::min(xmin, points2d(i, 0));
        xmax = std::max(xmax, points2d(i, 0));
        ymin = std::min(ymin, points2d(i, 1));
        ymax = std::max(ymax, points2d(i, 1));
    }
    const double xr = xmax - xmin, yr = ymax - ymin;
    auto px = [&](double x) { return xr > 0.0 ? mx + (x - xmin) / xr * (w - 2.0 * mx) : w / 2.0; };
    auto py = [&](double y) { return yr > 0.0 ? h - (my + (y - ymin) / yr * (h - 2.0 * my)) : h / 2.0; };

    // per-point fill colors
    std::vector<std::string> fill(n, "#4878cf");
    double vmin = 0.0, vmax = 0.0;
    std::size_t n_clusters = 0;
    if (!opts.color_values.empty()) {
        vmin = *std::min_element(opts.color_values.begin(), opts.color_values.end());
        vmax = *std::max_element(opts.color_values.begin(), opts.color_values.end());
        for (std::size_t i = 0; i < n; ++i)
            fill[i] = ramp_color(vmax > vmin ? (opts.color_values[i] - vmin) / (vmax - vmin) : 0.5);
    } else if (!opts.cluster_labels.empty()) {
        n_clusters = *std::max_element(opts.cluster_labels.begin(), opts.cluster_labels.end()) + 1;
        for (std::size_t i = 0; i < n; ++i)
            fill[i] = ramp_color(n_clusters > 1
                                     ? static_cast<double>(opts.cluster_labels[i]) / static_cast<double>(n_clusters - 1)
                                     : 0.5);
    }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opts.width) + "\" height=\"" +
           std::to_string(opts.height) + "\" viewBox=\"0 0 " + std::to_string(opts.width) + " " +
           std::to_string(opts.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!opts.title.empty())
        svg += "<text x=\"" + fmt("%.2f", w / 2.0) +
               "\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" + opts.title +
               "</text>\n";

    svg += "<g stroke=\"#333333\" stroke-width=\"0.5\">\n";
    for (std::size_t i = 0; i < n; ++i)
        svg += "<circle cx=\"" + fmt("%.2f", px(points2d(i, 0))) + "\" cy=\"" + fmt("%.2f", py(points2d(i, 1))) +
               "\" r=\"" + fmt("%.2f", opts.point_radius) + "\" fill=\"" + fill[i] + "\"/>\n";
    svg += "</g>\n";

    // legend
    if (!opts.color_values.empty()) {
        const double lx = w - mx - 120.0, ly = my;
        svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
        if (!opts.color_name.empty())
            svg += "<text x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", ly - 4.0) + "\">" + opts.color_name +
                   "</text>\n";
        for (int s = 0; s <= 4; ++s) {
            const double t = s / 4.0;
            svg += "<rect x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", ly + s * 16.0) +
                   "\" width=\"12\" height=\"12\" fill=\"" + ramp_color(t) + "\"/>\n";
            svg += "<text x=\"" + fmt("%.2f", lx + 16.0) + "\" y=\"" + fmt("%.2f", ly + s * 16.0 + 10.0) + "\">" +
                   fmt("%.6g", vmin + t * (vmax - vmin)) + "</text>\n";
        }
        svg += "</g>\n";
    } else if (!opts.cluster_labels.empty()) {
        const double lx = w - mx - 120.0, ly = my;
        svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
        if (!opts.color_name.empty())
            svg += "<text x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", ly - 4.0) + "\">" + opts.color_name +
                   "</text>\n";
        for (std::size_t m = 0; m < n_clusters; ++m) {
            const std::string color =
                ramp_color(n_clusters > 1 ? static_cast<double>(m) / static_cast<double>(n_clusters - 1) : 0.5);
            svg += "<rect x=\"" + fmt("%.2f", lx) + "\" y=\"" + fmt("%.2f", ly + m * 16.0) +
                   "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
            svg += "<text x=\"" + fmt("%.2f", lx + 16.0) + "\" y=\"" + fmt("%.2f", ly + m * 16.0 + 10.0) +
                   "\">cluster " + std::to_string(m) + "</text>\n";
        }
        svg += "</g>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_failure, "cannot write '" + path + "'");
    out << content;
    if (!out) raise(errc::io_failure, "write failed for '" + path + "'");
}

} // namespace motormap
