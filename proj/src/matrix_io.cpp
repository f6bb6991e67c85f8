#include "ksne/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "ksne/error.hpp"

namespace ksne {

std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes;
    for (int b = 0; b < 8; ++b) {
        bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
    }
    out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (in.gcount() != 8) {
        fail(ErrorKind::format, "matrix file truncated");
    }
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) {
        v = (v << 8) | bytes[b];
    }
    return v;
}

}  // namespace

void write_square_binary(std::ostream& out, const Matrix& m) {
    require(m.rows() == m.cols(), "binary matrix dump requires a square matrix");
    put_u64(out, m.rows());
    for (double v : m.values()) {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) {
        fail(ErrorKind::io, "failed writing matrix file");
    }
}

Matrix read_square_binary(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    if (n > (std::uint64_t{1} << 20)) {
        fail(ErrorKind::format, "matrix file declares implausible size " + std::to_string(n));
    }
    Matrix m(n, n);
    for (double& v : m.values()) {
        v = std::bit_cast<double>(get_u64(in));
    }
    return m;
}

void publish_square_binary(const std::filesystem::path& path, const Matrix& m) {
    std::random_device entropy;
    auto tmp = path;
    tmp += ".tmp." + std::to_string(entropy());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::io, "cannot create " + tmp.string());
        }
        write_square_binary(out, m);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::io, "cannot publish " + path.string());
    }
}

Matrix load_square_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::io, "cannot open " + path.string());
    }
    return read_square_binary(in);
}

}  // namespace ksne
