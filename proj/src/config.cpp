#include "ksne/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "ksne/error.hpp"
#include "ksne/matrix_io.hpp"

namespace ksne {

namespace {

const std::vector<std::string_view>& known_keys() {
    static const std::vector<std::string_view> keys = {
        "data", "format", "circle-n", "circle-radius", "circle-noise", "kmer-k", "alphabet",
        "kernel", "perplexity", "sigma", "psi", "trees", "approx-m", "approx-normalize", "joint-mode",
        "init", "ensemble-mode", "init-std", "lr", "momentum-early", "momentum-late", "momentum-switch",
        "iters", "checkpoint-every", "exaggeration", "exaggeration-iters", "adaptive-gains", "kmax",
        "hd-space", "seed", "out", "cache-dir", "jobs",
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double to_real(std::string_view key, std::string_view value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
        fail(ErrorKind::argument, "invalid number for " + std::string(key) + ": '" + std::string(value) + "'");
    }
    return v;
}

std::uint64_t to_count(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        fail(ErrorKind::argument, "invalid count for " + std::string(key) + ": '" + std::string(value) + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    fail(ErrorKind::argument, "invalid boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
    return known_keys();
}

bool is_config_key(std::string_view key) {
    for (auto k : known_keys()) {
        if (k == key) {
            return true;
        }
    }
    return false;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string value = trim(raw);
    const std::string_view v = value;
    if (key == "data") data = value;
    else if (key == "format") {
        if (v != "auto" && v != "fasta" && v != "csv" && v != "points") {
            fail(ErrorKind::argument, "unknown format '" + value + "'");
        }
        format = value;
    }
    else if (key == "circle-n") circle_n = to_count(key, v);
    else if (key == "circle-radius") circle_radius = to_real(key, v);
    else if (key == "circle-noise") {
        if (v.empty() || v == "auto") circle_noise.reset(); else circle_noise = to_real(key, v);
    }
    else if (key == "kmer-k") kmer_k = to_count(key, v);
    else if (key == "alphabet") alphabet = value;
    else if (key == "kernel") kernel = parse_kernel_kind(v);
    else if (key == "perplexity") perplexity = to_real(key, v);
    else if (key == "sigma") {
        if (v.empty() || v == "auto") sigma.reset(); else sigma = to_real(key, v);
    }
    else if (key == "psi") psi = to_count(key, v);
    else if (key == "trees") trees = to_count(key, v);
    else if (key == "approx-m") approx_m = to_count(key, v);
    else if (key == "approx-normalize") approx_normalize = to_bool(key, v);
    else if (key == "joint-mode") joint_mode = parse_joint_mode(v);
    else if (key == "init") init = parse_init_kind(v);
    else if (key == "ensemble-mode") ensemble_mode = parse_ensemble_mode(v);
    else if (key == "init-std") init_std = to_real(key, v);
    else if (key == "lr") optimizer.learning_rate = to_real(key, v);
    else if (key == "momentum-early") optimizer.momentum_early = to_real(key, v);
    else if (key == "momentum-late") optimizer.momentum_late = to_real(key, v);
    else if (key == "momentum-switch") optimizer.momentum_switch_iter = to_count(key, v);
    else if (key == "iters") optimizer.max_iters = to_count(key, v);
    else if (key == "checkpoint-every") optimizer.checkpoint_every = to_count(key, v);
    else if (key == "exaggeration") optimizer.early_exaggeration_factor = to_real(key, v);
    else if (key == "exaggeration-iters") optimizer.early_exaggeration_iters = to_count(key, v);
    else if (key == "adaptive-gains") optimizer.adaptive_gains = to_bool(key, v);
    else if (key == "kmax") kmax = to_count(key, v);
    else if (key == "hd-space") hd_space = parse_hd_space(v);
    else if (key == "seed") seed = to_count(key, v);
    else if (key == "out") out = value;
    else if (key == "cache-dir") cache_dir = value;
    else if (key == "jobs") {
        const auto jobs_value = to_count(key, v);
        require(jobs_value >= 1 && jobs_value <= 1024, "jobs must be in [1, 1024]");
        jobs = static_cast<int>(jobs_value);
    }
    else fail(ErrorKind::argument, "unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    auto n = [](std::uint64_t x) { return std::to_string(x); };
    return {
        {"data", data},
        {"format", format},
        {"circle-n", n(circle_n)},
        {"circle-radius", format_real(circle_radius)},
        {"circle-noise", circle_noise ? format_real(*circle_noise) : "auto"},
        {"kmer-k", n(kmer_k)},
        {"alphabet", alphabet},
        {"kernel", to_string(kernel)},
        {"perplexity", format_real(perplexity)},
        {"sigma", sigma ? format_real(*sigma) : "auto"},
        {"psi", n(psi)},
        {"trees", n(trees)},
        {"approx-m", n(approx_m)},
        {"approx-normalize", b(approx_normalize)},
        {"joint-mode", to_string(joint_mode)},
        {"init", to_string(init)},
        {"ensemble-mode", to_string(ensemble_mode)},
        {"init-std", format_real(init_std)},
        {"lr", format_real(optimizer.learning_rate)},
        {"momentum-early", format_real(optimizer.momentum_early)},
        {"momentum-late", format_real(optimizer.momentum_late)},
        {"momentum-switch", n(optimizer.momentum_switch_iter)},
        {"iters", n(optimizer.max_iters)},
        {"checkpoint-every", n(optimizer.checkpoint_every)},
        {"exaggeration", format_real(optimizer.early_exaggeration_factor)},
        {"exaggeration-iters", n(optimizer.early_exaggeration_iters)},
        {"adaptive-gains", b(optimizer.adaptive_gains)},
        {"kmax", n(kmax)},
        {"hd-space", to_string(hd_space)},
        {"seed", n(seed)},
        {"out", out},
        {"cache-dir", cache_dir},
        {"jobs", std::to_string(jobs)},
    };
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::io, "cannot open config file " + path.string());
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::format, "invalid manifest " + path.string() + ": " + e.what());
        }
        if (!manifest.contains("config") || !manifest["config"].is_object()) {
            fail(ErrorKind::format, "manifest " + path.string() + " has no config object");
        }
        for (const auto& [key, value] : manifest["config"].items()) {
            config.set(key, value.get<std::string>());
        }
        return;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(lines, line)) {
        ++number;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::format, path.string() + ":" + std::to_string(number) + ": expected key=value");
        }
        config.set(trim(stripped.substr(0, eq)), stripped.substr(eq + 1));
    }
}

}  // namespace ksne
