#ifndef KSNE_FEATURIZE_HPP
#define KSNE_FEATURIZE_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksne/ingest.hpp"
#include "ksne/matrix.hpp"

namespace ksne {

/// Ordered residue alphabet with an O(1) character -> position index.
class Alphabet {
public:
    Alphabet() { index_.fill(-1); }

    /// Throws Error(argument) on repeated symbols or an empty list.
    explicit Alphabet(std::string_view symbols);

    std::size_t size() const { return symbols_.size(); }
    const std::string& symbols() const { return symbols_; }
    char symbol(std::size_t position) const { return symbols_[position]; }

    /// Position of `c`, or -1 if not in the alphabet.
    int index(char c) const { return index_[static_cast<unsigned char>(c)]; }
    bool contains(char c) const { return index(c) >= 0; }

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::string symbols_;
    std::array<int, 256> index_{};
};

/// Sorted distinct characters over all sequences.
Alphabet infer_alphabet(const std::vector<SequenceRecord>& records);

/// |alphabet|^k, or an Error(argument) when it would exceed `limit`.
std::size_t spectrum_dimension(std::size_t alphabet_size, std::size_t k,
                               std::size_t limit = std::size_t{1} << 26);

/**
 * Counts of every length-k window of `sequence`. The k-mer c_1..c_k lands in
 * slot sum_j index(c_j) * |alphabet|^(k-j), so the vector has |alphabet|^k
 * entries and sums to len - k + 1.
 */
std::vector<double> kmer_spectrum(std::string_view sequence, std::size_t k, const Alphabet& alphabet);

/// Spike2Vec feature matrix: the k-mer spectra of the records stacked in input order.
struct FeatureMatrix {
    Matrix values;
    Alphabet alphabet;
    std::size_t k = 0;
};

/// Uses `alphabet` when given, else infer_alphabet(records). Errors carry the record id.
FeatureMatrix build_feature_matrix(const std::vector<SequenceRecord>& records, std::size_t k,
                                   const std::optional<Alphabet>& alphabet = std::nullopt);

}  // namespace ksne

#endif
