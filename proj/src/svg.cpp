#include "hornopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hornopt::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 50.0;

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

// round range endpoints to a "nice" tick spacing
std::vector<double> ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> out;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-12 * step; t += step) out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return out;
}

}  // namespace

void LinePlot::write(const std::filesystem::path& path) const {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const Series& s : series) {
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    for (double v : guide_lines) {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
    }
    if (!std::isfinite(x_min)) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (!std::isfinite(y_min)) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) {
        y_max += 0.5;
        y_min -= 0.5;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto map_x = [&](double v) { return kMarginLeft + (v - x_min) / (x_max - x_min) * plot_w; };
    const auto map_y = [&](double v) {
        return kMarginTop + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "  <text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(title) << "</text>\n";

    // grid + tick labels
    out << "  <g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double t : ticks(x_min, x_max)) {
        const double px = map_x(t);
        out << "    <line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kMarginTop) << "\" x2=\""
            << fmt(px) << "\" y2=\"" << fmt(kMarginTop + plot_h) << "\"/>\n";
    }
    for (double t : ticks(y_min, y_max)) {
        const double py = map_y(t);
        out << "    <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(py) << "\"/>\n";
    }
    out << "  </g>\n";
    out << "  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double t : ticks(x_min, x_max)) {
        out << "    <text x=\"" << fmt(map_x(t)) << "\" y=\"" << fmt(kMarginTop + plot_h + 16)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(y_min, y_max)) {
        out << "    <text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(map_y(t) + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "  </g>\n";

    // axis labels
    out << "  <text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(x_label) << "</text>\n";
    out << "  <text x=\"16\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2 << ")\">"
        << xml_escape(y_label) << "</text>\n";

    // frame
    out << "  <rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (double guide : guide_lines) {
        const double py = map_y(guide);
        out << "  <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(py)
            << "\" stroke=\"#b22222\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
    }

    for (const Series& s : series) {
        out << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" "
            << "points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i > 0) out << ' ';
            out << fmt(map_x(s.x[i])) << ',' << fmt(map_y(s.y[i]));
        }
        out << "\"/>\n";
    }

    // legend (top-right corner of the plot area)
    if (series.size() > 1 || (series.size() == 1 && !series[0].label.empty())) {
        double ly = kMarginTop + 14;
        for (const Series& s : series) {
            const double lx = kMarginLeft + plot_w - 130;
            out << "  <line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22
                << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"/>\n";
            out << "  <text x=\"" << lx + 28 << "\" y=\"" << ly
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label)
                << "</text>\n";
            ly += 16;
        }
    }
    out << "</svg>\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write SVG: " + path.string());
    file << out.str();
    if (!file) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace hornopt::svg
