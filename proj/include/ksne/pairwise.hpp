#ifndef KSNE_PAIRWISE_HPP
#define KSNE_PAIRWISE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ksne/matrix.hpp"

namespace ksne {

/**
 * Row access for pairwise distances over a feature matrix.
 *
 * K-mer spectra are mostly zeros, so rows below a density threshold are kept
 * as sorted (column, value) lists and merged pairwise. Skipped columns only
 * contribute exact zeros, so both paths return bit-identical sums.
 */
class RowStore {
public:
    explicit RowStore(const Matrix& points);

    std::size_t size() const { return rows_; }
    bool sparse() const { return sparse_; }

    double squared_euclidean(std::size_t a, std::size_t b) const;
    double manhattan(std::size_t a, std::size_t b) const;
    double dot(std::size_t a, std::size_t b) const;

private:
    const Matrix* dense_;
    std::size_t rows_;
    bool sparse_ = false;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> columns_;
    std::vector<double> values_;
};

enum class Metric { squared_euclidean, manhattan };

/// Symmetric N x N distance matrix; each unordered pair is evaluated once.
Matrix pairwise_distances(const Matrix& points, Metric metric);

}  // namespace ksne

#endif
