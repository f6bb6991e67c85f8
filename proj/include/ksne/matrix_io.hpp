#ifndef KSNE_MATRIX_IO_HPP
#define KSNE_MATRIX_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ksne/matrix.hpp"

namespace ksne {

/// Shortest text form that parses back to the same double ("%.17g").
std::string format_real(double value);

/**
 * Square-matrix cache format: 8-byte little-endian unsigned N followed by
 * N*N little-endian IEEE-754 doubles in row-major order.
 */
void write_square_binary(std::ostream& out, const Matrix& m);
Matrix read_square_binary(std::istream& in);

/// Writes to `path` through a temporary sibling and a rename, so readers
/// never observe a partially written file.
void publish_square_binary(const std::filesystem::path& path, const Matrix& m);
Matrix load_square_binary(const std::filesystem::path& path);

}  // namespace ksne

#endif
