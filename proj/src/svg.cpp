#include "ksne/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "ksne/error.hpp"

namespace ksne {

namespace {

constexpr double view = 1000.0;

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n"
        << "<text x=\"500\" y=\"28\" font-family=\"sans-serif\" font-size=\"20\" text-anchor=\"middle\">"
        << xml_escape(title) << "</text>\n";
}

}  // namespace

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default:
            // Control characters other than tab/newline are not valid XML 1.0.
            if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') {
                out += '?';
            } else {
                out += c;
            }
        }
    }
    return out;
}

std::string class_color(std::size_t i, std::size_t count) {
    // Evenly spaced hues, alternating lightness when there are many classes.
    const double hue = std::fmod(static_cast<double>(i) * 360.0 / static_cast<double>(std::max<std::size_t>(count, 1)), 360.0);
    const double light = count > 12 && (i % 2 == 1) ? 0.35 : 0.5;
    const double sat = 0.75;
    const double chroma = (1.0 - std::fabs(2.0 * light - 1.0)) * sat;
    const double h = hue / 60.0;
    const double x = chroma * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (h < 1) { r = chroma; g = x; }
    else if (h < 2) { r = x; g = chroma; }
    else if (h < 3) { g = chroma; b = x; }
    else if (h < 4) { g = x; b = chroma; }
    else if (h < 5) { r = x; b = chroma; }
    else { r = chroma; b = x; }
    const double m = light - chroma / 2.0;
    auto byte = [&](double v) { return static_cast<unsigned>(std::lround(std::clamp(v + m, 0.0, 1.0) * 255.0)); };
    char buffer[8];
    std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", byte(r), byte(g), byte(b));
    return buffer;
}

std::string render_scatter_svg(const Matrix& coords, const std::vector<std::string>& labels,
                               const std::string& title) {
    require(coords.cols() == 2, "scatter plot needs N x 2 coordinates");
    require(coords.rows() == labels.size(), "scatter plot needs one label per point");

    std::map<std::string, std::size_t> classes;
    for (const auto& label : labels) {
        classes.emplace(label, 0);
    }
    std::size_t next = 0;
    for (auto& [label, index] : classes) {
        index = next++;
    }

    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        xmin = std::min(xmin, coords(i, 0));
        xmax = std::max(xmax, coords(i, 0));
        ymin = std::min(ymin, coords(i, 1));
        ymax = std::max(ymax, coords(i, 1));
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
    const double left = 40.0;
    const double top = 50.0;
    const double extent = 720.0;
    auto px = [&](double v) { return left + (v - xmin) / span * extent; };
    auto py = [&](double v) { return top + extent - (v - ymin) / span * extent; };

    std::ostringstream svg;
    open_svg(svg, title);
    svg << "<g id=\"points\">\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        svg << "<circle cx=\"" << num(px(coords(i, 0))) << "\" cy=\"" << num(py(coords(i, 1)))
            << "\" r=\"2\" fill=\"" << class_color(classes[labels[i]], classes.size()) << "\"/>\n";
    }
    svg << "</g>\n<g id=\"legend\" font-family=\"sans-serif\">\n";
    const double step = std::min(22.0, 900.0 / static_cast<double>(std::max<std::size_t>(classes.size(), 1)));
    const double font = std::max(4.0, std::min(14.0, step * 0.7));
    for (const auto& [label, index] : classes) {
        const double y = 60.0 + step * static_cast<double>(index);
        svg << "<g class=\"legend-entry\"><circle cx=\"790\" cy=\"" << num(y) << "\" r=\"" << num(std::min(6.0, step / 3.0))
            << "\" fill=\"" << class_color(index, classes.size()) << "\"/><text x=\"802\" y=\"" << num(y + font / 3.0)
            << "\" font-size=\"" << num(font) << "\">" << xml_escape(label) << "</text></g>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string render_auc_svg(const std::vector<std::pair<std::size_t, double>>& series, const std::string& title) {
    require(!series.empty(), "AUC chart needs at least one point");
    double lo = 0.0;
    double hi = 1.0;
    for (const auto& [iter, auc] : series) {
        lo = std::min(lo, auc);
        hi = std::max(hi, auc);
    }
    const double first = static_cast<double>(series.front().first);
    const double last = static_cast<double>(series.back().first);
    const double width = std::max(last - first, 1.0);
    const double left = 100.0;
    const double right = 940.0;
    const double top = 80.0;
    const double bottom = 900.0;
    auto px = [&](double it) { return left + (it - first) / width * (right - left); };
    auto py = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

    std::ostringstream svg;
    open_svg(svg, title);
    svg << "<g stroke=\"#000000\" stroke-width=\"1\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom << "\"/>\n"
        << "</g>\n<g font-family=\"sans-serif\" font-size=\"14\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = lo + (hi - lo) * t / 5.0;
        svg << "<text x=\"" << num(left - 10) << "\" y=\"" << num(py(v) + 5) << "\" text-anchor=\"end\">" << num(v)
            << "</text>\n";
    }
    svg << "<text x=\"" << num(px(first)) << "\" y=\"925\" text-anchor=\"middle\">" << series.front().first << "</text>\n"
        << "<text x=\"" << num(px(last)) << "\" y=\"925\" text-anchor=\"middle\">" << series.back().first << "</text>\n"
        << "<text x=\"520\" y=\"960\" text-anchor=\"middle\">iteration</text>\n"
        << "<text x=\"30\" y=\"490\" text-anchor=\"middle\" transform=\"rotate(-90 30 490)\">AUC_RNX</text>\n"
        << "</g>\n<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
        svg << (i ? " " : "") << num(px(static_cast<double>(series[i].first))) << ',' << num(py(series[i].second));
    }
    svg << "\"/>\n";
    for (const auto& [iter, auc] : series) {
        svg << "<circle cx=\"" << num(px(static_cast<double>(iter))) << "\" cy=\"" << num(py(auc))
            << "\" r=\"3\" fill=\"#1f5fbf\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace ksne
