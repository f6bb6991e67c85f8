#ifndef KSNE_CONFIG_HPP
#define KSNE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksne/engine.hpp"
#include "ksne/eval.hpp"
#include "ksne/init.hpp"
#include "ksne/kernels.hpp"

namespace ksne {

/**
 * Fully resolved settings for one run. Keys match the CLI flag names
 * without the leading dashes ("kmer-k", "joint-mode", ...), so a config file
 * line `lr=100` and the flag `--lr 100` are interchangeable.
 */
struct RunConfig {
    std::string data;
    std::string format = "auto";  // auto | fasta | csv | points
    std::size_t circle_n = 0;     // generate a circle instead of reading `data`
    double circle_radius = 1.0;
    std::optional<double> circle_noise;  // defaults to 0.05 * radius
    std::size_t kmer_k = 3;
    std::string alphabet;  // empty: inferred

    KernelKind kernel = KernelKind::gaussian;
    double perplexity = 250.0;
    std::optional<double> sigma;  // laplacian; defaults to mean pairwise L1 / 2
    std::size_t psi = 16;
    std::size_t trees = 200;
    std::size_t approx_m = 0;
    bool approx_normalize = true;
    JointMode joint_mode = JointMode::row_normalize;

    InitKind init = InitKind::random;
    EnsembleMode ensemble_mode = EnsembleMode::aligned;
    double init_std = 1e-4;

    OptimizerParams optimizer;

    std::size_t kmax = 99;
    HdSpace hd_space = HdSpace::features;

    std::uint64_t seed = 0;
    std::string out = "ksne-run";
    std::string cache_dir;  // empty: <out>/cache
    int jobs = 1;

    /// Applies one key=value setting; throws Error(argument) on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);

    /// Canonical (key, value) pairs in a fixed order; the manifest records these.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Reads `key=value` lines ('#' comments) or a run manifest's "config" object.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

bool is_config_key(std::string_view key);

/// Every accepted key, in canonical order.
const std::vector<std::string_view>& config_keys();

}  // namespace ksne

#endif
