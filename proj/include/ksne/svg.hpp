#ifndef KSNE_SVG_HPP
#define KSNE_SVG_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ksne/matrix.hpp"

namespace ksne {

/// Escapes the five XML special characters.
std::string xml_escape(std::string_view text);

/// Distinct "#rrggbb" color for the i-th of `count` classes.
std::string class_color(std::size_t i, std::size_t count);

/**
 * 1000x1000 viewBox scatter plot of an N x 2 embedding: radius-2 circles,
 * one color per distinct label and a legend entry per label (labels in
 * sorted order).
 */
std::string render_scatter_svg(const Matrix& coords, const std::vector<std::string>& labels,
                               const std::string& title);

/// Line chart of (iteration, AUC_RNX) pairs.
std::string render_auc_svg(const std::vector<std::pair<std::size_t, double>>& series, const std::string& title);

}  // namespace ksne

#endif
