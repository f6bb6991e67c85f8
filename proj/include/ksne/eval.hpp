#ifndef KSNE_EVAL_HPP
#define KSNE_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "ksne/matrix.hpp"

namespace ksne {

/// Row i lists the k_max nearest other points of i, closest first, ties by
/// ascending index.
struct NeighborTable {
    std::size_t n = 0;
    std::size_t k_max = 0;
    std::vector<std::uint32_t> indices;  // n * k_max, row-major

    std::span<const std::uint32_t> row(std::size_t i) const { return {indices.data() + i * k_max, k_max}; }
};

/// Exact brute-force Euclidean neighbors. k_max must be in [1, N-1].
NeighborTable knn_table(const Matrix& points, std::size_t k_max);

/// Neighbors ranked by decreasing similarity (ties by index); diagonal ignored.
NeighborTable knn_table_from_similarity(const Matrix& similarity, std::size_t k_max);

/// Q(k) = sum_i |kNN_hd(i) ∩ kNN_ld(i)| / (n k), using the first k columns.
double neighborhood_agreement(const NeighborTable& hd, const NeighborTable& ld, std::size_t k);

/// R(k) = ((n-1) q - k) / (n-1-k), for 1 <= k <= n-2.
double r_of_k(double q, std::size_t n, std::size_t k);

/// sum_k R(k)/k / sum_k 1/k over the given (k, R) pairs.
double auc_rnx(const std::vector<std::pair<std::size_t, double>>& curve);

struct QualityCurve {
    std::vector<std::size_t> ks;
    std::vector<double> r_values;
    double auc_rnx = 0.0;
};

/// R(k) for k = 1..k_max from precomputed tables, then AUC_RNX.
QualityCurve quality_curve(const NeighborTable& hd, const NeighborTable& ld, std::size_t k_max);

/// Builds both Euclidean tables. Requires N >= k_max + 2.
QualityCurve quality_curve(const Matrix& hd_points, const Matrix& ld_points, std::size_t k_max = 99);

/// "k,R" rows followed by a final "auc_rnx,<value>" line.
void write_quality_csv(std::ostream& out, const QualityCurve& curve);

enum class HdSpace { features, kernel };

const char* to_string(HdSpace space);
HdSpace parse_hd_space(std::string_view name);

}  // namespace ksne

#endif
