#ifndef KSNE_INGEST_HPP
#define KSNE_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ksne/matrix.hpp"

namespace ksne {

/// One labeled biological sequence.
struct SequenceRecord {
    std::string id;
    std::string sequence;
    std::string label;

    bool operator==(const SequenceRecord&) const = default;
};

/// Numeric points row-aligned with ids and class labels.
struct PointDataset {
    std::vector<std::string> ids;
    Matrix points;
    std::vector<std::string> labels;
};

/**
 * Parses FASTA text. The header `>id|label|...` yields id and label from the
 * first two '|' fields; a header without '|' is used for both. Sequence lines
 * are concatenated with whitespace removed and uppercased.
 *
 * Throws Error(parse) on text before the first header (with its line
 * number) or on a record with an empty body, and Error(validation) on
 * duplicate ids.
 */
std::vector<SequenceRecord> parse_fasta(std::string_view text);
std::vector<SequenceRecord> parse_fasta(std::istream& in);

void write_fasta(std::ostream& out, const std::vector<SequenceRecord>& records);

/// Parses "id,sequence,label" CSV (LF or CRLF). Same record validation as FASTA.
std::vector<SequenceRecord> parse_labeled_csv(std::string_view text);
std::vector<SequenceRecord> parse_labeled_csv(std::istream& in);

void write_labeled_csv(std::ostream& out, const std::vector<SequenceRecord>& records);

/// Point CSV with header "id,x1,...,xD,label".
PointDataset parse_point_csv(std::string_view text);
PointDataset parse_point_csv(std::istream& in);
void write_point_csv(std::ostream& out, const PointDataset& data);

/// Checks the PointDataset invariants (aligned lengths, D >= 1, unique ids).
void validate(const PointDataset& data);

/**
 * Points on a noisy circle: point i sits at angle 2*pi*i/n with independent
 * Normal(0, noise_std^2) offsets per coordinate, labelled by the quadrant
 * ("0".."3") of its noise-free angle.
 */
PointDataset generate_circle(std::size_t n, double radius, double noise_std, std::uint64_t seed);

}  // namespace ksne

#endif
