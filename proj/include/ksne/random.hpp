#ifndef KSNE_RANDOM_HPP
#define KSNE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace ksne {

/**
 * Seeded generator with portable distributions.
 *
 * The standard library's distribution objects are implementation-defined,
 * so uniform, bounded-integer and normal draws are done by hand on top of
 * mt19937_64, whose output sequence is fixed by the standard.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound), bound > 0. Unbiased (rejection).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Box-Muller transform.
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace ksne

#endif
