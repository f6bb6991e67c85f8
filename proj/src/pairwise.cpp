#include "ksne/pairwise.hpp"

#include <cmath>

#include "ksne/parallel.hpp"

namespace ksne {

RowStore::RowStore(const Matrix& points) : dense_(&points), rows_(points.rows()) {
    std::size_t nonzero = 0;
    for (double v : points.values()) {
        nonzero += (v != 0.0);
    }
    const std::size_t total = points.rows() * points.cols();
    sparse_ = total > 0 && points.cols() >= 64 && nonzero * 4 < total;
    if (!sparse_) {
        return;
    }
    offsets_.reserve(rows_ + 1);
    offsets_.push_back(0);
    columns_.reserve(nonzero);
    values_.reserve(nonzero);
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto row = points.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c] != 0.0) {
                columns_.push_back(static_cast<std::uint32_t>(c));
                values_.push_back(row[c]);
            }
        }
        offsets_.push_back(columns_.size());
    }
}

namespace {

// Walks the union of two sorted sparse rows in column order, calling
// term(x, y) with 0 for a missing side.
template <typename Term>
double merge_sum(const std::uint32_t* ca, const double* va, std::size_t na,
                 const std::uint32_t* cb, const double* vb, std::size_t nb, Term term, bool intersect_only) {
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < na || j < nb) {
        if (j >= nb || (i < na && ca[i] < cb[j])) {
            if (!intersect_only) {
                sum += term(va[i], 0.0);
            }
            ++i;
        } else if (i >= na || cb[j] < ca[i]) {
            if (!intersect_only) {
                sum += term(0.0, vb[j]);
            }
            ++j;
        } else {
            sum += term(va[i], vb[j]);
            ++i;
            ++j;
        }
    }
    return sum;
}

template <typename Term>
double dense_sum(std::span<const double> a, std::span<const double> b, Term term) {
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        sum += term(a[c], b[c]);
    }
    return sum;
}

constexpr auto sq_term = [](double x, double y) { const double d = x - y; return d * d; };
constexpr auto abs_term = [](double x, double y) { return std::fabs(x - y); };
constexpr auto dot_term = [](double x, double y) { return x * y; };

}  // namespace

#define KSNE_ROWSTORE_DISPATCH(term, intersect)                                                    \
    if (!sparse_) {                                                                                \
        return dense_sum(dense_->row(a), dense_->row(b), term);                                    \
    }                                                                                              \
    const std::size_t oa = offsets_[a];                                                            \
    const std::size_t ob = offsets_[b];                                                            \
    return merge_sum(columns_.data() + oa, values_.data() + oa, offsets_[a + 1] - oa,              \
                     columns_.data() + ob, values_.data() + ob, offsets_[b + 1] - ob, term, intersect)

double RowStore::squared_euclidean(std::size_t a, std::size_t b) const {
    KSNE_ROWSTORE_DISPATCH(sq_term, false);
}

double RowStore::manhattan(std::size_t a, std::size_t b) const {
    KSNE_ROWSTORE_DISPATCH(abs_term, false);
}

double RowStore::dot(std::size_t a, std::size_t b) const {
    KSNE_ROWSTORE_DISPATCH(dot_term, true);
}

#undef KSNE_ROWSTORE_DISPATCH

Matrix pairwise_distances(const Matrix& points, Metric metric) {
    const RowStore store(points);
    const std::size_t n = points.rows();
    Matrix out(n, n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = metric == Metric::squared_euclidean ? store.squared_euclidean(i, j)
                                                                     : store.manhattan(i, j);
                out(i, j) = d;
                out(j, i) = d;
            }
        }
    });
    return out;
}

}  // namespace ksne
