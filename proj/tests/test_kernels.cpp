#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "ksne/kernels.hpp"
#include "ksne/matrix_io.hpp"
#include "ksne/pairwise.hpp"
#include "ksne/parallel.hpp"

using namespace ksne;
using testing::error_kind;

namespace {

double sq_dist(const Matrix& x, std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        d += (x(a, c) - x(b, c)) * (x(a, c) - x(b, c));
    }
    return d;
}

// Exact psi=2 isolation kernel: average over every unordered pair of centers.
Matrix exact_isolation_psi2(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix k(n, n, 0.0);
    std::size_t pairs = 0;
    std::vector<int> cell(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            ++pairs;
            for (std::size_t i = 0; i < n; ++i) {
                cell[i] = sq_dist(x, i, a) <= sq_dist(x, i, b) ? 0 : 1;
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    k(i, j) += cell[i] == cell[j] ? 1.0 : 0.0;
                }
            }
        }
    }
    for (double& v : k.values()) {
        v /= static_cast<double>(pairs);
    }
    return k;
}

// Entropy in bits of one conditional row, recomputed from scratch.
double row_perplexity(const Matrix& c, std::size_t i) {
    double h = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) {
        const double p = c(i, j);
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return std::exp2(h);
}

std::vector<SequenceRecord> random_sequences(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    const std::string symbols = "ACGT";
    std::vector<SequenceRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string s;
        const std::size_t len = 20 + gen() % 40;
        for (std::size_t c = 0; c < len; ++c) {
            s += symbols[gen() % 4];
        }
        out.push_back({"s" + std::to_string(i), s, std::to_string(i % 3)});
    }
    return out;
}

}  // namespace

TEST_CASE("gaussian: equilateral triangle is uniform") {
    // Unit vectors in 3D: every squared distance is exactly 2.
    Matrix x(3, 3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) x(i, i) = 1.0;
    for (double perp : {1.5, 1.9}) {
        const auto p = gaussian_joint(x, perp);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(p(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 6.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("gaussian: calibrated perplexity and normalization") {
    const Matrix x = testing::random_matrix(120, 5, 3);
    const auto c = gaussian_conditionals(x, 30.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        CHECK(std::abs(row_perplexity(c.conditional, i) - 30.0) < 1e-4);
        CHECK(c.conditional(i, i) == 0.0);
    }
    const auto p = gaussian_joint(x, 30.0);
    CHECK_NOTHROW(validate_joint(p));
    double total = 0.0;
    for (double v : p.values.values()) total += v;
    CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("gaussian: invariant to translation and rotation") {
    const Matrix x = testing::random_matrix(60, 2, 5);
    Matrix moved(60, 2);
    const double a = 0.7;
    for (std::size_t i = 0; i < 60; ++i) {
        moved(i, 0) = std::cos(a) * x(i, 0) - std::sin(a) * x(i, 1) + 3.0;
        moved(i, 1) = std::sin(a) * x(i, 0) + std::cos(a) * x(i, 1) - 2.0;
    }
    const auto p = gaussian_joint(x, 10.0);
    const auto q = gaussian_joint(moved, 10.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.values.values().size(); ++i) {
        worst = std::max(worst, std::abs(p.values.values()[i] - q.values.values()[i]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("gaussian: errors") {
    const Matrix x = testing::random_matrix(20, 3, 1);
    CHECK(error_kind([&] { gaussian_joint(x, 1.0); }) == ErrorKind::argument);
    CHECK(error_kind([&] { gaussian_joint(x, 19.0); }) == ErrorKind::argument);
    CHECK(error_kind([&] { gaussian_joint(Matrix(10, 2, 1.0), 3.0); }) == ErrorKind::degenerate);
    Matrix dup = testing::random_matrix(10, 2, 2);
    dup(1, 0) = dup(0, 0);
    dup(1, 1) = dup(0, 1);
    CHECK_NOTHROW(gaussian_joint(dup, 3.0));
}

TEST_CASE("isolation: diagonal, psi=1 and errors") {
    const Matrix x = testing::random_matrix(30, 3, 8);
    const auto k = isolation_kernel(x, 4, 50, 1);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(k.values(i, i) == 1.0);
        for (std::size_t j = 0; j < 30; ++j) {
            CHECK(k.values(i, j) == k.values(j, i));
            CHECK(k.values(i, j) >= 0.0);
            CHECK(k.values(i, j) <= 1.0);
        }
    }
    const auto ones = isolation_kernel(x, 1, 10, 1);
    for (double v : ones.values.values()) CHECK(v == 1.0);
    CHECK(error_kind([&] { isolation_kernel(x, 31, 10, 1); }) == ErrorKind::argument);
    CHECK(error_kind([&] { isolation_kernel(x, 2, 0, 1); }) == ErrorKind::argument);
    CHECK(isolation_kernel(x, 4, 50, 1).values == k.values);
}

TEST_CASE("isolation: Monte Carlo matches the exact two-center expectation") {
    const Matrix x = testing::two_clusters(20, 50.0, 1.0, 4);
    const Matrix exact = exact_isolation_psi2(x);
    const std::size_t t = 200;
    const auto k = isolation_kernel(x, 2, t, 99);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = i + 1; j < 20; ++j) {
            const double p = exact(i, j);
            const double se = std::sqrt(p * (1 - p) / static_cast<double>(t));
            CHECK(std::abs(k.values(i, j) - p) <= 3 * se + 1e-12);
            if ((i < 10) != (j < 10)) {
                CHECK(p <= 0.6);
                CHECK(k.values(i, j) <= 0.6);
            }
        }
    }
}

TEST_CASE("laplacian") {
    Matrix x(2, 2);
    x(1, 0) = 1.0;
    x(1, 1) = 2.0;
    const auto k = laplacian_kernel(x, 1.0);
    CHECK(k.values(0, 1) == doctest::Approx(0.22313016014842982).epsilon(1e-14));
    CHECK(k.values(0, 1) == std::exp(-1.5));
    CHECK(k.values(0, 0) == 1.0);
    CHECK(laplacian_kernel(x, 1e6).values(0, 1) > 1.0 - 1e-11);
    CHECK(error_kind([&] { laplacian_kernel(x, 0.0); }) == ErrorKind::argument);
    CHECK(error_kind([&] { laplacian_kernel(x, -1.0); }) == ErrorKind::argument);
}

TEST_CASE("laplacian: default sigma and permutation equivariance") {
    const Matrix x = testing::random_matrix(25, 4, 12);
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = i + 1; j < 25; ++j) {
            for (std::size_t c = 0; c < 4; ++c) total += std::abs(x(i, c) - x(j, c));
            ++pairs;
        }
    }
    CHECK(default_laplacian_sigma(x) == doctest::Approx(total / static_cast<double>(pairs) / 2.0).epsilon(1e-12));

    std::vector<std::size_t> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(3));
    Matrix y(25, 4);
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t c = 0; c < 4; ++c) y(i, c) = x(perm[i], c);
    }
    const auto kx = laplacian_kernel(x, 0.8);
    const auto ky = laplacian_kernel(y, 0.8);
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = 0; j < 25; ++j) {
            CHECK(ky.values(i, j) == kx.values(perm[i], perm[j]));
        }
    }
}

TEST_CASE("approximate kernel") {
    SUBCASE("identical and disjoint spectra") {
        const auto k = approximate_kernel({{"a", "ACGTAC", "x"}, {"b", "ACGTAC", "y"}, {"c", "GGGG", "z"}}, 3, 0);
        CHECK(k.values(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(k.values(0, 0) == 1.0);
        const auto d = approximate_kernel({{"a", "AAA", "x"}, {"b", "CCC", "y"}}, 3, 0);
        CHECK(d.values(0, 1) == 0.0);
    }
    SUBCASE("cosine matches a dictionary oracle") {
        const auto a = testing::oracle_kmers("AAAB", 2);
        const auto b = testing::oracle_kmers("AABB", 2);
        double dot = 0, na = 0, nb = 0;
        for (const auto& [kmer, c] : a) {
            na += c * c;
            if (b.count(kmer)) dot += c * b.at(kmer);
        }
        for (const auto& [kmer, c] : b) nb += c * c;
        const auto k = approximate_kernel({{"a", "AAAB", "x"}, {"b", "AABB", "y"}}, 2, 0, true, Alphabet("AB"));
        CHECK(k.values(0, 1) == doctest::Approx(dot / std::sqrt(na * nb)).epsilon(1e-14));
        CHECK(k.values(0, 1) == doctest::Approx(3.0 / std::sqrt(15.0)).epsilon(1e-14));
        const auto raw = approximate_kernel({{"a", "AAAB", "x"}, {"b", "AABB", "y"}}, 2, 0, false, Alphabet("AB"));
        CHECK(raw.values(0, 1) == 3.0);
        CHECK(raw.values(0, 0) == 5.0);
    }
    SUBCASE("errors") {
        CHECK(error_kind([] { approximate_kernel({{"a", "ACG", "x"}, {"b", "ACG", "y"}}, 3, 1); }) ==
              ErrorKind::unsupported);
        CHECK(error_kind([] { approximate_kernel({{"a", "AC", "x"}, {"b", "ACG", "y"}}, 3, 0); }) ==
              ErrorKind::featurization);
    }
    SUBCASE("permutation equivariance") {
        auto recs = random_sequences(12, 2);
        const auto k = approximate_kernel(recs, 3, 0);
        std::vector<SequenceRecord> rev(recs.rbegin(), recs.rend());
        const auto kr = approximate_kernel(rev, 3, 0, true, Alphabet("ACGT"));
        for (std::size_t i = 0; i < 12; ++i) {
            for (std::size_t j = 0; j < 12; ++j) {
                CHECK(kr.values(i, j) == k.values(11 - i, 11 - j));
            }
        }
    }
}

TEST_CASE("kernel_to_joint") {
    SUBCASE("uniform kernel") {
        const auto p = kernel_to_joint({Matrix(3, 3, 1.0), KernelKind::laplacian});
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(p(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 6.0).epsilon(1e-15));
            }
        }
    }
    SUBCASE("hand-normalized 3x3") {
        Matrix k(3, 3, 0.0);
        k(0, 1) = k(1, 0) = 2.0;
        k(0, 2) = k(2, 0) = 1.0;
        k(1, 2) = k(2, 1) = 1.0;
        const auto p = kernel_to_joint({k, KernelKind::laplacian});
        CHECK(p(0, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
        CHECK(p(0, 2) == doctest::Approx(5.0 / 36.0).epsilon(1e-15));
        CHECK(p(1, 2) == doctest::Approx(5.0 / 36.0).epsilon(1e-15));
        const auto g = kernel_to_joint({k, KernelKind::laplacian}, JointMode::global_normalize);
        CHECK(g(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(g(0, 2) == doctest::Approx(0.125).epsilon(1e-15));
        CHECK(g(2, 1) == doctest::Approx(0.125).epsilon(1e-15));
    }
    SUBCASE("zero row is degenerate") {
        Matrix k(3, 3, 0.0);
        k(0, 1) = k(1, 0) = 1.0;
        k(2, 2) = 1.0;
        CHECK(error_kind([&] { kernel_to_joint({k, KernelKind::laplacian}); }) == ErrorKind::degenerate);
    }
    SUBCASE("every kernel yields a valid joint in both modes") {
        const Matrix x = testing::random_matrix(40, 3, 21);
        const auto recs = random_sequences(40, 5);
        for (JointMode mode : {JointMode::row_normalize, JointMode::global_normalize}) {
            for (const auto& k : {isolation_kernel(x, 8, 50, 3), laplacian_kernel(x, 1.0),
                                  approximate_kernel(recs, 3, 0)}) {
                const auto p = kernel_to_joint(k, mode);
                CHECK_NOTHROW(validate_joint(p));
            }
        }
    }
}

TEST_CASE("validate_joint rejects broken distributions") {
    Matrix p(2, 2, 0.0);
    p(0, 1) = p(1, 0) = 0.5;
    CHECK_NOTHROW(validate_joint({p}));
    Matrix asym = p;
    asym(0, 1) = 0.6;
    asym(1, 0) = 0.4;
    CHECK(error_kind([&] { validate_joint({asym}); }) == ErrorKind::validation);
    Matrix diag = p;
    diag(0, 0) = 0.1;
    CHECK(error_kind([&] { validate_joint({diag}); }) == ErrorKind::validation);
    Matrix scaled = p;
    scaled(0, 1) = scaled(1, 0) = 0.4;
    CHECK(error_kind([&] { validate_joint({scaled}); }) == ErrorKind::validation);
}

TEST_CASE("kernels are identical across thread counts") {
    const Matrix x = testing::random_matrix(150, 6, 31);
    auto build = [&](int threads) {
        ThreadScope scope(threads);
        return std::vector<Matrix>{gaussian_joint(x, 20.0).values, isolation_kernel(x, 8, 64, 5).values,
                                   laplacian_kernel(x, 0.9).values};
    };
    const auto one = build(1);
    CHECK(build(3) == one);
    CHECK(build(8) == one);
}

TEST_CASE("sparse and dense distance paths agree bitwise") {
    // Wide, mostly-zero rows take the sparse path.
    std::mt19937 gen(17);
    Matrix sparse(30, 500, 0.0);
    for (std::size_t i = 0; i < 30; ++i) {
        for (int e = 0; e < 12; ++e) sparse(i, gen() % 500) += static_cast<double>(1 + gen() % 5);
    }
    const RowStore store(sparse);
    CHECK(store.sparse());
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) {
            double se = 0, l1 = 0, dot = 0;
            for (std::size_t c = 0; c < 500; ++c) {
                const double a = sparse(i, c), b = sparse(j, c);
                se += (a - b) * (a - b);
                l1 += std::abs(a - b);
                dot += a * b;
            }
            CHECK(store.squared_euclidean(i, j) == se);
            CHECK(store.manhattan(i, j) == l1);
            CHECK(store.dot(i, j) == dot);
        }
    }
    const auto d = pairwise_distances(sparse, Metric::manhattan);
    CHECK(d(3, 7) == d(7, 3));
}

TEST_CASE("square binary format") {
    Matrix m(3, 3);
    for (std::size_t i = 0; i < 9; ++i) m.values()[i] = 0.1 * static_cast<double>(i) - 0.3;
    std::ostringstream out;
    write_square_binary(out, m);
    const std::string bytes = out.str();
    REQUIRE(bytes.size() == 8 + 9 * 8);
    CHECK(static_cast<unsigned char>(bytes[0]) == 3);
    for (int b = 1; b < 8; ++b) CHECK(bytes[b] == 0);
    std::istringstream in(bytes);
    CHECK(read_square_binary(in) == m);

    const auto dir = testing::temp_dir("binary");
    publish_square_binary(dir / "m.bin", m);
    CHECK(load_square_binary(dir / "m.bin") == m);
    std::istringstream truncated(bytes.substr(0, 40));
    CHECK(error_kind([&] { read_square_binary(truncated); }).has_value());
    CHECK(error_kind([&] { load_square_binary(dir / "missing.bin"); }) == ErrorKind::io);
}
