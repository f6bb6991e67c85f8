#include "ksne/init.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ksne/error.hpp"
#include "ksne/random.hpp"

namespace ksne {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Matrix to_matrix(const Eigen::MatrixXd& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out(r, c) = m(r, c);
        }
    }
    return out;
}

// Dense direct eigensolves up to this size, subspace iteration beyond.
constexpr Eigen::Index direct_limit = 2048;

struct Spectrum {
    Eigen::MatrixXd loadings;  // D x count
    Eigen::VectorXd values;    // eigenvalues of Xc^T Xc, descending
};

Spectrum top_eigenpairs(const Eigen::MatrixXd& symmetric, Eigen::Index count) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    const Eigen::Index m = symmetric.rows();
    Spectrum s{Eigen::MatrixXd(m, count), Eigen::VectorXd(count)};
    for (Eigen::Index c = 0; c < count; ++c) {
        s.values(c) = solver.eigenvalues()(m - 1 - c);
        s.loadings.col(c) = solver.eigenvectors().col(m - 1 - c);
    }
    return s;
}

Spectrum subspace_iteration(const Eigen::Map<const RowMatrix>& x, const Eigen::RowVectorXd& mean,
                            Eigen::Index count) {
    const Eigen::Index d = x.cols();
    const Eigen::Index block = std::min<Eigen::Index>(d, count + 6);
    Rng rng(0x9ca5eedULL);
    Eigen::MatrixXd q(d, block);
    for (Eigen::Index c = 0; c < block; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            q(r, c) = rng.normal();
        }
    }
    auto project = [&](const Eigen::MatrixXd& basis) -> Eigen::MatrixXd {
        Eigen::MatrixXd y = x * basis;
        y.rowwise() -= mean * basis;
        return y;
    };
    auto orthonormalize = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    };

    q = orthonormalize(q);
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(count);
    for (int iter = 0; iter < 300; ++iter) {
        const Eigen::MatrixXd y = project(q);
        Eigen::MatrixXd z = x.transpose() * y;
        z -= mean.transpose() * y.colwise().sum();
        q = orthonormalize(z);

        const Eigen::MatrixXd b = project(q);
        const Spectrum ritz = top_eigenpairs(b.transpose() * b, count);
        const double change = (ritz.values - previous).cwiseAbs().maxCoeff();
        previous = ritz.values;
        if (change <= 1e-12 * std::max(1.0, ritz.values(0))) {
            break;
        }
    }
    const Eigen::MatrixXd b = project(q);
    Spectrum ritz = top_eigenpairs(b.transpose() * b, count);
    ritz.loadings = q * ritz.loadings;
    return ritz;
}

}  // namespace

const char* to_string(Provenance provenance) {
    switch (provenance) {
    case Provenance::random: return "random";
    case Provenance::pca: return "pca";
    case Provenance::ica: return "ica";
    case Provenance::ensemble: return "ensemble";
    case Provenance::optimizer: return "optimizer";
    }
    return "unknown";
}

const char* to_string(InitKind kind) {
    switch (kind) {
    case InitKind::random: return "random";
    case InitKind::pca: return "pca";
    case InitKind::ica: return "ica";
    case InitKind::ensemble: return "ensemble";
    }
    return "unknown";
}

InitKind parse_init_kind(std::string_view name) {
    for (auto kind : {InitKind::random, InitKind::pca, InitKind::ica, InitKind::ensemble}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    fail(ErrorKind::argument, "unknown init '" + std::string(name) + "'");
}

const char* to_string(EnsembleMode mode) {
    return mode == EnsembleMode::aligned ? "aligned" : "raw";
}

EnsembleMode parse_ensemble_mode(std::string_view name) {
    if (name == "aligned") {
        return EnsembleMode::aligned;
    }
    if (name == "raw") {
        return EnsembleMode::raw;
    }
    fail(ErrorKind::argument, "unknown ensemble mode '" + std::string(name) + "'");
}

void validate(const Embedding& e) {
    if (e.coords.cols() != 2) {
        fail(ErrorKind::validation, "embedding must have exactly 2 columns");
    }
    for (double v : e.coords.values()) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::validation, "embedding contains a non-finite value");
        }
    }
}

Embedding random_init(std::size_t n, std::uint64_t seed) {
    require(n >= 1, "random init needs at least one point");
    Rng rng(seed);
    Embedding e{Matrix(n, 2), Provenance::random};
    for (double& v : e.coords.values()) {
        v = 1e-4 * rng.normal();
    }
    return e;
}

PrincipalComponents principal_components(const Matrix& points, std::size_t count) {
    const auto n = static_cast<Eigen::Index>(points.rows());
    const auto d = static_cast<Eigen::Index>(points.cols());
    const auto want = static_cast<Eigen::Index>(count);
    require(count >= 1, "need at least one component");
    require(n >= 2 && d >= want, "PCA needs N >= 2 and D >= " + std::to_string(count));

    const auto x = view(points);
    const Eigen::RowVectorXd mean = x.colwise().mean();

    Spectrum spectrum;
    if (d <= direct_limit) {
        const RowMatrix centered = x.rowwise() - mean;
        spectrum = top_eigenpairs(centered.transpose() * centered, want);
    } else if (n <= direct_limit) {
        const RowMatrix centered = x.rowwise() - mean;
        Spectrum gram = top_eigenpairs(centered * centered.transpose(), want);
        spectrum.values = gram.values;
        spectrum.loadings = centered.transpose() * gram.loadings;
        for (Eigen::Index c = 0; c < want; ++c) {
            const double norm = spectrum.loadings.col(c).norm();
            if (norm > 0.0) {
                spectrum.loadings.col(c) /= norm;
            }
        }
    } else {
        spectrum = subspace_iteration(x, mean, want);
    }

    PrincipalComponents pc;
    for (Eigen::Index c = 0; c < want; ++c) {
        pc.singular_values.push_back(std::sqrt(std::max(spectrum.values(c), 0.0)));
    }
    const double leading = pc.singular_values.front();
    if (!(leading > 0.0) || pc.singular_values.back() <= 1e-10 * leading) {
        fail(ErrorKind::degenerate, "data has rank below " + std::to_string(count) + " after centering");
    }

    for (Eigen::Index c = 0; c < want; ++c) {
        auto col = spectrum.loadings.col(c);
        Eigen::Index arg = 0;
        for (Eigen::Index r = 1; r < d; ++r) {
            if (std::fabs(col(r)) > std::fabs(col(arg))) {
                arg = r;
            }
        }
        if (col(arg) < 0.0) {
            col = -col;
        }
    }

    Eigen::MatrixXd scores = x * spectrum.loadings;
    scores.rowwise() -= mean * spectrum.loadings;
    pc.scores = to_matrix(scores);
    pc.loadings = to_matrix(spectrum.loadings);
    return pc;
}

Embedding pca_init(const Matrix& points) {
    return {principal_components(points, 2).scores, Provenance::pca};
}

namespace {

// W <- (W W^T)^{-1/2} W
Eigen::Matrix2d decorrelate(const Eigen::Matrix2d& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(w * w.transpose());
    const Eigen::Vector2d inv_sqrt = solver.eigenvalues().cwiseSqrt().cwiseInverse();
    return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose() * w;
}

}  // namespace

IcaResult ica_init(const Matrix& points, std::uint64_t seed, const IcaOptions& options) {
    require(points.rows() >= 3, "ICA needs at least 3 points");
    const PrincipalComponents pc = principal_components(points, 2);
    const std::size_t n = points.rows();

    Eigen::MatrixXd z(n, 2);
    for (std::size_t c = 0; c < 2; ++c) {
        const double sd = column_std(pc.scores, c);
        for (std::size_t i = 0; i < n; ++i) {
            z(i, c) = pc.scores(i, c) / sd;
        }
    }

    Rng rng(seed);
    Eigen::Matrix2d w;
    w << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    w = decorrelate(w);

    IcaResult result;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Eigen::Matrix2d next;
        for (int r = 0; r < 2; ++r) {
            const Eigen::Vector2d wr = w.row(r).transpose();
            Eigen::Vector2d expectation = Eigen::Vector2d::Zero();
            double derivative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double u = z(i, 0) * wr(0) + z(i, 1) * wr(1);
                const double g = std::tanh(u);
                expectation(0) += z(i, 0) * g;
                expectation(1) += z(i, 1) * g;
                derivative += 1.0 - g * g;
            }
            next.row(r) = (expectation * inv_n - derivative * inv_n * wr).transpose();
        }
        next = decorrelate(next);
        double change = 0.0;
        for (int r = 0; r < 2; ++r) {
            change = std::max(change, std::fabs(1.0 - std::fabs(next.row(r).dot(w.row(r)))));
        }
        w = next;
        result.iterations = iter;
        if (change < options.tolerance) {
            result.converged = true;
            break;
        }
    }

    result.embedding = {to_matrix(z * w.transpose()), Provenance::ica};
    validate(result.embedding);
    return result;
}

double column_std(const Matrix& m, std::size_t c) {
    const std::size_t n = m.rows();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += m(i, c);
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = m(i, c) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

double pearson(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb) {
    require(a.rows() == b.rows() && a.rows() >= 2, "pearson needs two equal-length columns");
    const std::size_t n = a.rows();
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a(i, ca);
        mb += b(i, cb);
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a(i, ca) - ma;
        const double db = b(i, cb) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

Embedding combine_ensemble(const Embedding& pca, const Embedding& ica, EnsembleMode mode) {
    require(pca.coords.rows() == ica.coords.rows() && pca.coords.cols() == 2 && ica.coords.cols() == 2,
            "ensemble inputs must both be N x 2");
    const std::size_t n = pca.coords.rows();
    Matrix aligned = ica.coords;
    if (mode == EnsembleMode::aligned) {
        bool claimed[2] = {false, false};
        for (std::size_t c = 0; c < 2; ++c) {
            std::size_t pick = 0;
            double best = -1.0;
            double best_r = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                if (claimed[k]) {
                    continue;
                }
                const double r = pearson(pca.coords, c, ica.coords, k);
                if (std::fabs(r) > best) {
                    best = std::fabs(r);
                    best_r = r;
                    pick = k;
                }
            }
            claimed[pick] = true;
            const double source_sd = column_std(ica.coords, pick);
            const double scale = source_sd > 0.0 ? column_std(pca.coords, c) / source_sd : 0.0;
            const double sign = best_r < 0.0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                aligned(i, c) = sign * ica.coords(i, pick) * scale;
            }
        }
    }
    Embedding out{Matrix(n, 2), Provenance::ensemble};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            out.coords(i, c) = 0.5 * (pca.coords(i, c) + aligned(i, c));
        }
    }
    return out;
}

EnsembleResult ensemble_init(const Matrix& points, std::uint64_t seed, EnsembleMode mode,
                             const IcaOptions& options) {
    const Embedding pca = pca_init(points);
    IcaResult ica = ica_init(points, seed, options);
    Embedding combined = combine_ensemble(pca, ica.embedding, mode);
    return {std::move(combined), std::move(ica)};
}

Embedding rescale_init(const Embedding& e, double target_std) {
    require(target_std > 0.0, "target standard deviation must be positive");
    validate(e);
    Embedding out = e;
    const std::size_t n = e.coords.rows();
    for (std::size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += e.coords(i, c);
        }
        mean /= static_cast<double>(n);
        const double sd = column_std(e.coords, c);
        if (!(sd > 0.0)) {
            fail(ErrorKind::degenerate, "embedding column " + std::to_string(c) + " has zero variance");
        }
        const double scale = target_std / sd;
        for (std::size_t i = 0; i < n; ++i) {
            out.coords(i, c) = (e.coords(i, c) - mean) * scale;
        }
    }
    return out;
}

InitialEmbedding make_initial_embedding(InitKind kind, const Matrix& points, std::uint64_t seed,
                                        EnsembleMode ensemble_mode, double target_std) {
    InitialEmbedding init;
    switch (kind) {
    case InitKind::random:
        init.embedding = random_init(points.rows(), seed);
        break;
    case InitKind::pca:
        init.embedding = pca_init(points);
        break;
    case InitKind::ica: {
        IcaResult ica = ica_init(points, seed);
        init.embedding = std::move(ica.embedding);
        init.ica_used = true;
        init.ica_converged = ica.converged;
        init.ica_iterations = ica.iterations;
        break;
    }
    case InitKind::ensemble: {
        EnsembleResult ensemble = ensemble_init(points, seed, ensemble_mode);
        init.embedding = std::move(ensemble.embedding);
        init.ica_used = true;
        init.ica_converged = ensemble.ica.converged;
        init.ica_iterations = ensemble.ica.iterations;
        break;
    }
    }
    const Provenance provenance = init.embedding.provenance;
    init.embedding = rescale_init(init.embedding, target_std);
    init.embedding.provenance = provenance;
    return init;
}

}  // namespace ksne
