#include "ksne/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iterator>
#include <istream>
#include <numbers>
#include <ostream>
#include <unordered_set>

#include "ksne/error.hpp"
#include "ksne/matrix_io.hpp"
#include "ksne/random.hpp"

namespace ksne {

namespace {

/// Splits on '\n' and drops a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(sep, start);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_blank(std::string_view s) {
    return trim(s).empty();
}

void append_residues(std::string& out, std::string_view line) {
    for (unsigned char c : line) {
        if (!std::isspace(c)) {
            out.push_back(static_cast<char>(std::toupper(c)));
        }
    }
}

std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void check_unique_ids(const std::vector<SequenceRecord>& records) {
    std::unordered_set<std::string_view> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.id).second) {
            fail(ErrorKind::validation, "duplicate record id '" + r.id + "'");
        }
    }
}

}  // namespace

std::vector<SequenceRecord> parse_fasta(std::string_view text) {
    std::vector<SequenceRecord> records;
    const auto lines = split_lines(text);
    bool open = false;

    auto close_record = [&]() {
        if (open && records.back().sequence.empty()) {
            fail(ErrorKind::parse, "record '" + records.back().id + "' has an empty sequence");
        }
    };

    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view line = lines[n];
        if (!line.empty() && line.front() == '>') {
            close_record();
            const std::string_view header = trim(line.substr(1));
            if (header.empty()) {
                fail(ErrorKind::parse, "line " + std::to_string(n + 1) + ": empty FASTA header");
            }
            SequenceRecord record;
            const auto fields = split_fields(header, '|');
            if (fields.size() == 1) {
                record.id = std::string(header);
                record.label = std::string(header);
            } else {
                record.id = std::string(trim(fields[0]));
                record.label = std::string(trim(fields[1]));
            }
            if (record.id.empty()) {
                fail(ErrorKind::parse, "line " + std::to_string(n + 1) + ": FASTA header has an empty id");
            }
            records.push_back(std::move(record));
            open = true;
            continue;
        }
        if (is_blank(line)) {
            continue;
        }
        if (!open) {
            fail(ErrorKind::parse,
                 "line " + std::to_string(n + 1) + ": expected a '>' header at the start of a record");
        }
        append_residues(records.back().sequence, line);
    }
    close_record();
    check_unique_ids(records);
    return records;
}

std::vector<SequenceRecord> parse_fasta(std::istream& in) {
    return parse_fasta(read_all(in));
}

void write_fasta(std::ostream& out, const std::vector<SequenceRecord>& records) {
    for (const auto& r : records) {
        out << '>' << r.id << '|' << r.label << '\n' << r.sequence << '\n';
    }
}

std::vector<SequenceRecord> parse_labeled_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != "id,sequence,label") {
        fail(ErrorKind::format, "labeled CSV must start with the header 'id,sequence,label'");
    }
    std::vector<SequenceRecord> records;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (is_blank(lines[n])) {
            continue;
        }
        const auto fields = split_fields(lines[n], ',');
        if (fields.size() != 3) {
            fail(ErrorKind::format, "line " + std::to_string(n + 1) + ": expected 3 fields, found " +
                                        std::to_string(fields.size()));
        }
        SequenceRecord record{std::string(trim(fields[0])), {}, std::string(trim(fields[2]))};
        append_residues(record.sequence, fields[1]);
        if (record.id.empty()) {
            fail(ErrorKind::format, "line " + std::to_string(n + 1) + ": empty id");
        }
        if (record.sequence.empty()) {
            fail(ErrorKind::parse, "record '" + record.id + "' has an empty sequence");
        }
        records.push_back(std::move(record));
    }
    check_unique_ids(records);
    return records;
}

std::vector<SequenceRecord> parse_labeled_csv(std::istream& in) {
    return parse_labeled_csv(read_all(in));
}

void write_labeled_csv(std::ostream& out, const std::vector<SequenceRecord>& records) {
    out << "id,sequence,label\n";
    for (const auto& r : records) {
        out << r.id << ',' << r.sequence << ',' << r.label << '\n';
    }
}

PointDataset parse_point_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        fail(ErrorKind::format, "point CSV is empty (missing header)");
    }
    const auto header = split_fields(lines.front(), ',');
    if (header.size() < 3 || header.front() != "id" || header.back() != "label") {
        fail(ErrorKind::format, "point CSV header must be 'id,x1,...,xD,label'");
    }
    const std::size_t dim = header.size() - 2;

    PointDataset data;
    std::vector<double> values;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (is_blank(lines[n])) {
            continue;
        }
        const auto fields = split_fields(lines[n], ',');
        if (fields.size() != dim + 2) {
            fail(ErrorKind::format, "line " + std::to_string(n + 1) + ": expected " +
                                        std::to_string(dim + 2) + " fields, found " +
                                        std::to_string(fields.size()));
        }
        data.ids.emplace_back(trim(fields.front()));
        data.labels.emplace_back(trim(fields.back()));
        for (std::size_t d = 0; d < dim; ++d) {
            const std::string_view field = trim(fields[d + 1]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
                fail(ErrorKind::format, "line " + std::to_string(n + 1) + ": invalid number '" +
                                            std::string(field) + "'");
            }
            values.push_back(v);
        }
    }
    data.points = Matrix(data.ids.size(), dim, std::move(values));
    validate(data);
    return data;
}

PointDataset parse_point_csv(std::istream& in) {
    return parse_point_csv(read_all(in));
}

void write_point_csv(std::ostream& out, const PointDataset& data) {
    out << "id";
    for (std::size_t d = 0; d < data.points.cols(); ++d) {
        out << ",x" << (d + 1);
    }
    out << ",label\n";
    for (std::size_t i = 0; i < data.points.rows(); ++i) {
        out << data.ids[i];
        for (double v : data.points.row(i)) {
            out << ',' << format_real(v);
        }
        out << ',' << data.labels[i] << '\n';
    }
}

void validate(const PointDataset& data) {
    if (data.points.rows() != data.labels.size() || data.points.rows() != data.ids.size()) {
        fail(ErrorKind::validation, "point dataset rows, ids and labels are not aligned");
    }
    if (data.points.cols() < 1) {
        fail(ErrorKind::validation, "point dataset must have at least one coordinate column");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : data.ids) {
        if (!seen.insert(id).second) {
            fail(ErrorKind::validation, "duplicate point id '" + id + "'");
        }
    }
}

PointDataset generate_circle(std::size_t n, double radius, double noise_std, std::uint64_t seed) {
    require(n >= 3, "circle needs at least 3 points");
    require(radius > 0.0, "circle radius must be positive");
    require(noise_std >= 0.0, "circle noise_std must be non-negative");

    Rng rng(seed);
    PointDataset data;
    data.points = Matrix(n, 2);
    data.ids.reserve(n);
    data.labels.reserve(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = step * static_cast<double>(i);
        const double ex = noise_std > 0.0 ? noise_std * rng.normal() : 0.0;
        const double ey = noise_std > 0.0 ? noise_std * rng.normal() : 0.0;
        data.points(i, 0) = radius * std::cos(angle) + ex;
        data.points(i, 1) = radius * std::sin(angle) + ey;
        // Quadrant from the index keeps boundaries exact (angle i*step vs k*pi/2).
        const std::size_t quadrant = std::min<std::size_t>(4 * i / n, 3);
        data.ids.push_back("p" + std::to_string(i));
        data.labels.push_back(std::to_string(quadrant));
    }
    return data;
}

}  // namespace ksne
