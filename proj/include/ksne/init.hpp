#ifndef KSNE_INIT_HPP
#define KSNE_INIT_HPP

#include <cstdint>
#include <string_view>

#include "ksne/matrix.hpp"

namespace ksne {

enum class Provenance { random, pca, ica, ensemble, optimizer };

const char* to_string(Provenance provenance);

/// N x 2 low-dimensional coordinates.
struct Embedding {
    Matrix coords;
    Provenance provenance = Provenance::random;

    std::size_t size() const { return coords.rows(); }
};

/// Throws Error(validation) unless the embedding has 2 columns of finite values.
void validate(const Embedding& e);

enum class InitKind { random, pca, ica, ensemble };

const char* to_string(InitKind kind);
InitKind parse_init_kind(std::string_view name);

/// Entries i.i.d. Normal(0, 1e-4^2).
Embedding random_init(std::size_t n, std::uint64_t seed);

/// Top principal directions of the column-centered data.
struct PrincipalComponents {
    Matrix scores;    ///< N x count, centered data projected on the directions
    Matrix loadings;  ///< D x count, unit right singular vectors
    std::vector<double> singular_values;
};

/**
 * Leading `count` principal components, ordered by decreasing singular
 * value, each flipped so that its largest-magnitude loading is positive.
 * Rank below `count` raises Error(degenerate).
 */
PrincipalComponents principal_components(const Matrix& points, std::size_t count = 2);

Embedding pca_init(const Matrix& points);

struct IcaOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;
};

struct IcaResult {
    Embedding embedding;
    bool converged = false;
    int iterations = 0;
};

/**
 * Two-component FastICA: PCA-whiten to two unit-variance columns, then
 * symmetric fixed-point iteration with the log-cosh contrast (g = tanh) from
 * a seeded random orthogonal start. Convergence is max |1 - |<w_new, w_old>||
 * over unmixing rows. A non-converged result is still returned.
 */
IcaResult ica_init(const Matrix& points, std::uint64_t seed, const IcaOptions& options = {});

enum class EnsembleMode { aligned, raw };

const char* to_string(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(std::string_view name);

/**
 * Averages a PCA and an ICA embedding. In aligned mode each PCA column, in
 * order, claims the remaining ICA column with the largest |Pearson r|, which
 * is sign-flipped to positive correlation and rescaled to the PCA column's
 * standard deviation before averaging. Raw mode averages as given.
 */
Embedding combine_ensemble(const Embedding& pca, const Embedding& ica, EnsembleMode mode = EnsembleMode::aligned);

struct EnsembleResult {
    Embedding embedding;
    IcaResult ica;
};

EnsembleResult ensemble_init(const Matrix& points, std::uint64_t seed,
                             EnsembleMode mode = EnsembleMode::aligned, const IcaOptions& options = {});

/// Centers each column and scales it to standard deviation `target_std`.
Embedding rescale_init(const Embedding& e, double target_std = 1e-4);

/// Population standard deviation of column `c`.
double column_std(const Matrix& m, std::size_t c);

/// Pearson correlation of two columns of equal length.
double pearson(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb);

struct InitialEmbedding {
    Embedding embedding;
    bool ica_used = false;
    bool ica_converged = true;
    int ica_iterations = 0;
};

/// Builds the requested start and passes it through rescale_init(target_std).
InitialEmbedding make_initial_embedding(InitKind kind, const Matrix& points, std::uint64_t seed,
                                        EnsembleMode ensemble_mode = EnsembleMode::aligned,
                                        double target_std = 1e-4);

}  // namespace ksne

#endif
