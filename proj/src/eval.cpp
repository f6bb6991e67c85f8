#include "ksne/eval.hpp"

#include <algorithm>
#include <ostream>

#include "ksne/error.hpp"
#include "ksne/matrix_io.hpp"
#include "ksne/pairwise.hpp"
#include "ksne/parallel.hpp"

namespace ksne {

namespace {

template <typename Score>
NeighborTable rank_neighbors(std::size_t n, std::size_t k_max, Score score) {
    require(k_max >= 1, "k_max must be at least 1");
    require(k_max < n, "k_max=" + std::to_string(k_max) + " must be below N=" + std::to_string(n));
    NeighborTable table{n, k_max, std::vector<std::uint32_t>(n * k_max)};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::uint32_t>> candidates;
        candidates.reserve(n - 1);
        for (std::size_t i = begin; i < end; ++i) {
            candidates.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    candidates.emplace_back(score(i, j), static_cast<std::uint32_t>(j));
                }
            }
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k_max),
                              candidates.end());
            for (std::size_t r = 0; r < k_max; ++r) {
                table.indices[i * k_max + r] = candidates[r].second;
            }
        }
    }, 8);
    return table;
}

}  // namespace

NeighborTable knn_table(const Matrix& points, std::size_t k_max) {
    const RowStore store(points);
    return rank_neighbors(points.rows(), k_max,
                          [&](std::size_t i, std::size_t j) { return store.squared_euclidean(i, j); });
}

NeighborTable knn_table_from_similarity(const Matrix& similarity, std::size_t k_max) {
    require(similarity.rows() == similarity.cols(), "similarity matrix must be square");
    return rank_neighbors(similarity.rows(), k_max,
                          [&](std::size_t i, std::size_t j) { return -similarity(i, j); });
}

double neighborhood_agreement(const NeighborTable& hd, const NeighborTable& ld, std::size_t k) {
    require(hd.n == ld.n, "neighbor tables cover different point counts");
    require(k >= 1 && k <= hd.k_max && k <= ld.k_max, "k=" + std::to_string(k) + " is outside the neighbor tables");
    std::uint64_t shared = 0;
    std::vector<std::uint32_t> a(k);
    std::vector<std::uint32_t> b(k);
    for (std::size_t i = 0; i < hd.n; ++i) {
        std::copy_n(hd.row(i).begin(), k, a.begin());
        std::copy_n(ld.row(i).begin(), k, b.begin());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::size_t x = 0;
        std::size_t y = 0;
        while (x < k && y < k) {
            if (a[x] < b[y]) {
                ++x;
            } else if (b[y] < a[x]) {
                ++y;
            } else {
                ++shared;
                ++x;
                ++y;
            }
        }
    }
    return static_cast<double>(shared) / (static_cast<double>(hd.n) * static_cast<double>(k));
}

double r_of_k(double q, std::size_t n, std::size_t k) {
    require(k >= 1 && k + 2 <= n, "R(k) needs 1 <= k <= n-2 (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    const double m = static_cast<double>(n - 1);
    return (m * q - static_cast<double>(k)) / (m - static_cast<double>(k));
}

double auc_rnx(const std::vector<std::pair<std::size_t, double>>& curve) {
    require(!curve.empty(), "AUC needs at least one (k, R) point");
    double weighted = 0.0;
    double weights = 0.0;
    std::size_t previous = 0;
    for (const auto& [k, r] : curve) {
        require(k > previous, "k values must be increasing and at least 1");
        previous = k;
        weighted += r / static_cast<double>(k);
        weights += 1.0 / static_cast<double>(k);
    }
    return weighted / weights;
}

QualityCurve quality_curve(const NeighborTable& hd, const NeighborTable& ld, std::size_t k_max) {
    require(hd.n >= k_max + 2, "quality curve needs N >= k_max + 2");
    QualityCurve curve;
    std::vector<std::pair<std::size_t, double>> points;
    for (std::size_t k = 1; k <= k_max; ++k) {
        const double r = r_of_k(neighborhood_agreement(hd, ld, k), hd.n, k);
        curve.ks.push_back(k);
        curve.r_values.push_back(r);
        points.emplace_back(k, r);
    }
    curve.auc_rnx = auc_rnx(points);
    return curve;
}

QualityCurve quality_curve(const Matrix& hd_points, const Matrix& ld_points, std::size_t k_max) {
    require(hd_points.rows() == ld_points.rows(), "HD and LD point counts differ");
    require(k_max >= 1 && hd_points.rows() >= k_max + 2,
            "quality curve needs N >= k_max + 2 (N=" + std::to_string(hd_points.rows()) + ", k_max=" +
                std::to_string(k_max) + ")");
    return quality_curve(knn_table(hd_points, k_max), knn_table(ld_points, k_max), k_max);
}

void write_quality_csv(std::ostream& out, const QualityCurve& curve) {
    out << "k,R\n";
    for (std::size_t i = 0; i < curve.ks.size(); ++i) {
        out << curve.ks[i] << ',' << format_real(curve.r_values[i]) << '\n';
    }
    out << "auc_rnx," << format_real(curve.auc_rnx) << '\n';
}

const char* to_string(HdSpace space) {
    return space == HdSpace::features ? "features" : "kernel";
}

HdSpace parse_hd_space(std::string_view name) {
    if (name == "features") {
        return HdSpace::features;
    }
    if (name == "kernel") {
        return HdSpace::kernel;
    }
    fail(ErrorKind::argument, "unknown hd space '" + std::string(name) + "'");
}

}  // namespace ksne
