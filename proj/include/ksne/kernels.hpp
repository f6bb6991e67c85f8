#ifndef KSNE_KERNELS_HPP
#define KSNE_KERNELS_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ksne/featurize.hpp"
#include "ksne/ingest.hpp"
#include "ksne/matrix.hpp"

namespace ksne {

enum class KernelKind { gaussian, isolation, laplacian, approximate };

const char* to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// N x N symmetric similarity matrix.
struct KernelMatrix {
    Matrix values;
    KernelKind kind = KernelKind::laplacian;
};

/// Symmetric joint probabilities with zero diagonal summing to one (P or Q).
struct JointDistribution {
    Matrix values;

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

/// Throws Error(validation) unless `p` is square, symmetric, zero-diagonal,
/// nonnegative and sums to one within `sum_tolerance`.
void validate_joint(const JointDistribution& p, double sum_tolerance = 1e-9);

/// Per-row Gaussian conditionals p_{j|i} and the precisions found for them.
struct GaussianConditionals {
    Matrix conditional;        ///< row i holds p_{j|i}; zero diagonal
    std::vector<double> beta;  ///< 1 / (2 sigma_i^2) per row
};

/**
 * Calibrates one precision per row by bisection so that the conditional
 * distribution over squared Euclidean distances has 2^H within 1e-5 of
 * `perplexity` (at most 200 steps).
 *
 * Requires N >= 3 and 1 < perplexity < N - 1. A row whose distances to all
 * other points are zero raises Error(degenerate) naming the row.
 */
GaussianConditionals gaussian_conditionals(const Matrix& points, double perplexity);

/// gaussian_conditionals followed by P = (C + C^T) / 2N.
JointDistribution gaussian_joint(const Matrix& points, double perplexity);

/// Fraction of t seeded Voronoi partitions (psi sampled centers each, round r
/// seeded with seed + r) in which two points share a cell.
KernelMatrix isolation_kernel(const Matrix& points, std::size_t psi, std::size_t t, std::uint64_t seed);

/// exp(-||x - y||_1 / (2 sigma^2)).
KernelMatrix laplacian_kernel(const Matrix& points, double sigma);

/// Mean pairwise L1 distance divided by two.
double default_laplacian_sigma(const Matrix& points);

/**
 * Spectrum kernel over k-mer counts. Only exact matching (m = 0) is
 * supported. With `normalize` the kernel is the cosine of the two spectra
 * (unit diagonal); otherwise the raw dot product.
 */
KernelMatrix approximate_kernel(const std::vector<SequenceRecord>& records, std::size_t k, std::size_t m,
                                bool normalize = true, const std::optional<Alphabet>& alphabet = std::nullopt);

enum class JointMode { row_normalize, global_normalize };

const char* to_string(JointMode mode);
JointMode parse_joint_mode(std::string_view name);

/**
 * Turns a kernel into a joint distribution.
 *
 * row_normalize: zero the diagonal, normalize each row to conditionals and
 * symmetrize as (C + C^T) / 2N. global_normalize: zero the diagonal,
 * symmetrize and divide by the total.
 */
JointDistribution kernel_to_joint(const KernelMatrix& kernel, JointMode mode = JointMode::row_normalize);

/// (C + C^T) / 2N for a row-stochastic C, each pair computed once.
JointDistribution symmetrize_conditionals(const Matrix& conditional);

}  // namespace ksne

#endif
