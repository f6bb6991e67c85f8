#include "ksne/featurize.hpp"

#include <algorithm>

#include "ksne/error.hpp"
#include "ksne/parallel.hpp"

namespace ksne {

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols) {
    index_.fill(-1);
    require(!symbols_.empty(), "alphabet must not be empty");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        auto& slot = index_[static_cast<unsigned char>(symbols_[i])];
        require(slot < 0, std::string("alphabet repeats symbol '") + symbols_[i] + "'");
        slot = static_cast<int>(i);
    }
}

Alphabet infer_alphabet(const std::vector<SequenceRecord>& records) {
    std::array<bool, 256> seen{};
    for (const auto& r : records) {
        for (unsigned char c : r.sequence) {
            seen[c] = true;
        }
    }
    std::string symbols;
    for (int c = 0; c < 256; ++c) {
        if (seen[c]) {
            symbols.push_back(static_cast<char>(c));
        }
    }
    require(!symbols.empty(), "cannot infer an alphabet from no residues");
    return Alphabet(symbols);
}

std::size_t spectrum_dimension(std::size_t alphabet_size, std::size_t k, std::size_t limit) {
    require(k >= 1, "k-mer length must be at least 1");
    require(alphabet_size >= 1, "alphabet must not be empty");
    std::size_t dim = 1;
    for (std::size_t j = 0; j < k; ++j) {
        require(dim <= limit / alphabet_size,
                "spectrum dimension " + std::to_string(alphabet_size) + "^" + std::to_string(k) +
                    " is too large");
        dim *= alphabet_size;
    }
    return dim;
}

namespace {

void accumulate_spectrum(std::string_view sequence, std::size_t k, const Alphabet& alphabet,
                         std::span<double> out) {
    if (sequence.size() < k) {
        fail(ErrorKind::argument, "sequence of length " + std::to_string(sequence.size()) +
                                      " is shorter than k=" + std::to_string(k));
    }
    const std::size_t base = alphabet.size();
    const std::size_t dim = out.size();
    std::size_t slot = 0;
    for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
        const int code = alphabet.index(sequence[pos]);
        if (code < 0) {
            fail(ErrorKind::featurization, std::string("character '") + sequence[pos] +
                                               "' at position " + std::to_string(pos) +
                                               " is not in the alphabet");
        }
        slot = (slot * base + static_cast<std::size_t>(code)) % dim;
        if (pos + 1 >= k) {
            out[slot] += 1.0;
        }
    }
}

}  // namespace

std::vector<double> kmer_spectrum(std::string_view sequence, std::size_t k, const Alphabet& alphabet) {
    std::vector<double> counts(spectrum_dimension(alphabet.size(), k), 0.0);
    accumulate_spectrum(sequence, k, alphabet, counts);
    return counts;
}

FeatureMatrix build_feature_matrix(const std::vector<SequenceRecord>& records, std::size_t k,
                                   const std::optional<Alphabet>& alphabet) {
    require(!records.empty(), "cannot featurize an empty record list");
    FeatureMatrix features;
    features.alphabet = alphabet ? *alphabet : infer_alphabet(records);
    features.k = k;
    const std::size_t dim = spectrum_dimension(features.alphabet.size(), k);
    features.values = Matrix(records.size(), dim);

    parallel_for(records.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                accumulate_spectrum(records[i].sequence, k, features.alphabet, features.values.row(i));
            } catch (const Error& e) {
                throw Error(e.kind(), "record '" + records[i].id + "': " + e.what());
            }
        }
    }, 4);
    return features;
}

}  // namespace ksne
