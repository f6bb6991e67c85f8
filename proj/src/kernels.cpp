#include "ksne/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ksne/error.hpp"
#include "ksne/pairwise.hpp"
#include "ksne/parallel.hpp"
#include "ksne/random.hpp"

namespace ksne {

const char* to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::isolation: return "isolation";
    case KernelKind::laplacian: return "laplacian";
    case KernelKind::approximate: return "approximate";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    for (auto kind : {KernelKind::gaussian, KernelKind::isolation, KernelKind::laplacian,
                      KernelKind::approximate}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    fail(ErrorKind::argument, "unknown kernel '" + std::string(name) + "'");
}

const char* to_string(JointMode mode) {
    return mode == JointMode::row_normalize ? "row-normalize" : "global-normalize";
}

JointMode parse_joint_mode(std::string_view name) {
    if (name == "row-normalize") {
        return JointMode::row_normalize;
    }
    if (name == "global-normalize") {
        return JointMode::global_normalize;
    }
    fail(ErrorKind::argument, "unknown joint mode '" + std::string(name) + "'");
}

void validate_joint(const JointDistribution& p, double sum_tolerance) {
    const std::size_t n = p.size();
    if (p.values.cols() != n) {
        fail(ErrorKind::validation, "joint distribution is not square");
    }
    std::vector<double> row_sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (p(i, i) != 0.0) {
            fail(ErrorKind::validation, "joint distribution has a nonzero diagonal at row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = p(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                fail(ErrorKind::validation, "joint distribution has an invalid entry at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v != p(j, i)) {
                fail(ErrorKind::validation, "joint distribution is not symmetric at (" + std::to_string(i) +
                                                "," + std::to_string(j) + ")");
            }
            row_sums[i] += v;
        }
    }
    const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    if (std::fabs(total - 1.0) > sum_tolerance) {
        fail(ErrorKind::validation, "joint distribution sums to " + std::to_string(total));
    }
}

JointDistribution symmetrize_conditionals(const Matrix& conditional) {
    const std::size_t n = conditional.rows();
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    JointDistribution p{Matrix(n, n, 0.0)};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = (conditional(i, j) + conditional(j, i)) * scale;
                p.values(i, j) = v;
                p.values(j, i) = v;
            }
        }
    });
    return p;
}

namespace {

struct RowCalibration {
    double beta;
    double perplexity;
};

// Fills `out` (length n, slot `self` zero) with exp(-beta * (d - dmin)) / sum
// for the beta whose perplexity matches `target`.
RowCalibration calibrate_row(std::span<const double> distances, std::size_t self, double target,
                             std::span<double> out) {
    const std::size_t n = distances.size();
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != self) {
            dmin = std::min(dmin, distances[j]);
            dmax = std::max(dmax, distances[j]);
        }
    }
    if (dmax == 0.0) {
        fail(ErrorKind::degenerate,
             "row " + std::to_string(self) + " has zero distance to every other point");
    }

    const double target_entropy = std::log(target);
    double beta = 1.0 / (dmax - dmin > 0.0 ? dmax - dmin : 1.0);
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double perplexity = 0.0;

    for (int step = 0; step < 200; ++step) {
        double sum = 0.0;
        double weighted = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == self) {
                out[j] = 0.0;
                continue;
            }
            const double shifted = distances[j] - dmin;
            const double w = std::exp(-beta * shifted);
            out[j] = w;
            sum += w;
            weighted += w * shifted;
        }
        const double entropy = std::log(sum) + beta * weighted / sum;
        perplexity = std::exp(entropy);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] /= sum;
        }
        if (std::fabs(perplexity - target) < 1e-5) {
            break;
        }
        if (entropy > target_entropy) {
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
        } else {
            hi = beta;
            beta = 0.5 * (lo + beta);
        }
    }
    return {beta, perplexity};
}

}  // namespace

GaussianConditionals gaussian_conditionals(const Matrix& points, double perplexity) {
    const std::size_t n = points.rows();
    require(n >= 3, "Gaussian affinities need at least 3 points");
    require(perplexity > 1.0 && perplexity < static_cast<double>(n - 1),
            "perplexity must lie in (1, N-1); got " + std::to_string(perplexity) + " for N=" +
                std::to_string(n));

    const Matrix distances = pairwise_distances(points, Metric::squared_euclidean);
    GaussianConditionals result{Matrix(n, n, 0.0), std::vector<double>(n, 0.0)};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            result.beta[i] = calibrate_row(distances.row(i), i, perplexity, result.conditional.row(i)).beta;
        }
    });
    return result;
}

JointDistribution gaussian_joint(const Matrix& points, double perplexity) {
    auto p = symmetrize_conditionals(gaussian_conditionals(points, perplexity).conditional);
    validate_joint(p);
    return p;
}

KernelMatrix isolation_kernel(const Matrix& points, std::size_t psi, std::size_t t, std::uint64_t seed) {
    const std::size_t n = points.rows();
    require(psi >= 1, "isolation kernel psi must be at least 1");
    require(psi <= n, "isolation kernel psi=" + std::to_string(psi) + " exceeds N=" + std::to_string(n));
    require(t >= 1, "isolation kernel needs at least one partition");

    const RowStore store(points);
    // cells[i * t + r]: center slot that owns point i in round r.
    std::vector<std::uint32_t> cells(n * t, 0);
    parallel_for(t, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> order(n);
        std::vector<std::size_t> centers(psi);
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(seed + r);
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t s = 0; s < psi; ++s) {
                const std::size_t pick = s + static_cast<std::size_t>(rng.below(n - s));
                std::swap(order[s], order[pick]);
                centers[s] = order[s];
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t best = 0;
                double best_distance = std::numeric_limits<double>::infinity();
                for (std::size_t s = 0; s < psi; ++s) {
                    const double d = centers[s] == i ? 0.0 : store.squared_euclidean(i, centers[s]);
                    if (d < best_distance || (d == best_distance && centers[s] < centers[best])) {
                        best = s;
                        best_distance = d;
                    }
                }
                cells[i * t + r] = static_cast<std::uint32_t>(best);
            }
        }
    }, 1);

    KernelMatrix kernel{Matrix(n, n, 0.0), KernelKind::isolation};
    const double inv_t = 1.0 / static_cast<double>(t);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernel.values(i, i) = 1.0;
            const std::uint32_t* ci = cells.data() + i * t;
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::uint32_t* cj = cells.data() + j * t;
                std::size_t same = 0;
                for (std::size_t r = 0; r < t; ++r) {
                    same += (ci[r] == cj[r]);
                }
                const double v = static_cast<double>(same) * inv_t;
                kernel.values(i, j) = v;
                kernel.values(j, i) = v;
            }
        }
    });
    return kernel;
}

double default_laplacian_sigma(const Matrix& points) {
    const std::size_t n = points.rows();
    require(n >= 2, "need at least two points for a data-adaptive sigma");
    const RowStore store(points);
    std::vector<double> row_sums(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                row_sums[i] += store.manhattan(i, j);
            }
        }
    });
    const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return total / pairs / 2.0;
}

KernelMatrix laplacian_kernel(const Matrix& points, double sigma) {
    require(sigma > 0.0 && std::isfinite(sigma), "laplacian sigma must be positive");
    KernelMatrix kernel{pairwise_distances(points, Metric::manhattan), KernelKind::laplacian};
    const double scale = 1.0 / (2.0 * sigma * sigma);
    for (double& v : kernel.values.values()) {
        v = std::exp(-v * scale);
    }
    return kernel;
}

KernelMatrix approximate_kernel(const std::vector<SequenceRecord>& records, std::size_t k, std::size_t m,
                                bool normalize, const std::optional<Alphabet>& alphabet) {
    if (m > 0) {
        fail(ErrorKind::unsupported, "approximate kernel supports only exact matching (m = 0)");
    }
    for (const auto& record : records) {
        if (record.sequence.size() < k) {
            fail(ErrorKind::featurization, "record '" + record.id + "' is shorter than k=" + std::to_string(k));
        }
    }
    const FeatureMatrix spectra = build_feature_matrix(records, k, alphabet);
    const std::size_t n = records.size();
    const RowStore store(spectra.values);
    std::vector<double> self(n), norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        self[i] = store.dot(i, i);
        norms[i] = std::sqrt(self[i]);
    }
    KernelMatrix kernel{Matrix(n, n, 0.0), KernelKind::approximate};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernel.values(i, i) = normalize ? 1.0 : self[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                double v = store.dot(i, j);
                if (normalize) {
                    v /= norms[i] * norms[j];
                }
                kernel.values(i, j) = v;
                kernel.values(j, i) = v;
            }
        }
    });
    return kernel;
}

JointDistribution kernel_to_joint(const KernelMatrix& kernel, JointMode mode) {
    const Matrix& k = kernel.values;
    const std::size_t n = k.rows();
    require(n >= 2 && k.cols() == n, "kernel must be square with N >= 2");

    std::vector<double> row_sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double v = k(i, j);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                fail(ErrorKind::argument, "kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                                              ") is negative or not finite");
            }
            row_sums[i] += v;
        }
    }

    JointDistribution p;
    if (mode == JointMode::row_normalize) {
        Matrix conditional(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (row_sums[i] <= 0.0) {
                fail(ErrorKind::degenerate, "kernel row " + std::to_string(i) + " has no positive off-diagonal entry");
            }
            for (std::size_t j = 0; j < n; ++j) {
                conditional(i, j) = j == i ? 0.0 : k(i, j) / row_sums[i];
            }
        }
        p = symmetrize_conditionals(conditional);
    } else {
        const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
        if (total <= 0.0) {
            fail(ErrorKind::degenerate, "kernel has no positive off-diagonal entry");
        }
        p.values = Matrix(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = 0.5 * (k(i, j) + k(j, i)) / total;
                p.values(i, j) = v;
                p.values(j, i) = v;
            }
        }
    }
    validate_joint(p);
    return p;
}

}  // namespace ksne
