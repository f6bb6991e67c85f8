#ifndef KSNE_TESTS_HELPERS_HPP
#define KSNE_TESTS_HELPERS_HPP

// Shared fixtures and independent oracles. Nothing here calls into the code
// under test, so comparisons against these are genuine cross-checks.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ksne/error.hpp"
#include "ksne/matrix.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ksne-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline ksne::Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed, double scale = 1.0) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal(0.0, scale);
    ksne::Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = normal(gen);
    }
    return m;
}

/// Two Gaussian blobs of n/2 points each, centers `gap` apart along x.
inline ksne::Matrix two_clusters(std::size_t n, double gap, double spread, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal(0.0, spread);
    ksne::Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, 0) = (i < n / 2 ? 0.0 : gap) + normal(gen);
        m(i, 1) = normal(gen);
    }
    return m;
}

/// Random symmetric, zero-diagonal matrix normalized to sum one.
inline ksne::Matrix random_joint(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    ksne::Matrix p(n, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            p(i, j) = p(j, i) = u(gen);
            total += 2 * p(i, j);
        }
    }
    for (double& v : p.values()) {
        v /= total;
    }
    return p;
}

/// Kind of the ksne::Error thrown by fn, or nullopt if it returns normally.
template <typename Fn>
std::optional<ksne::ErrorKind> error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const ksne::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

template <typename Fn>
std::string error_message(Fn&& fn) {
    try {
        fn();
    } catch (const ksne::Error& e) {
        return e.what();
    }
    return {};
}

// ---- oracles ---------------------------------------------------------------

/// kNN by sorting every other point on (distance, index).
inline std::vector<std::vector<std::size_t>> oracle_knn(const ksne::Matrix& x, std::size_t k) {
    std::vector<std::vector<std::size_t>> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < x.rows(); ++j) {
            if (j == i) continue;
            double d = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                d += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            }
            all.emplace_back(d, j);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t m = 0; m < k; ++m) {
            out[i].push_back(all[m].second);
        }
    }
    return out;
}

/// AUC_RNX computed from scratch: neighbor sets, intersections, R(k), weighted mean.
inline double oracle_auc(const ksne::Matrix& hd, const ksne::Matrix& ld, std::size_t kmax,
                         std::vector<double>* r_out = nullptr) {
    const auto a = oracle_knn(hd, kmax);
    const auto b = oracle_knn(ld, kmax);
    const double n = static_cast<double>(hd.rows());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < hd.rows(); ++i) {
            for (std::size_t s = 0; s < k; ++s) {
                for (std::size_t t = 0; t < k; ++t) {
                    hits += a[i][s] == b[i][t] ? 1 : 0;
                }
            }
        }
        const double q = static_cast<double>(hits) / (n * static_cast<double>(k));
        const double r = ((n - 1) * q - static_cast<double>(k)) / (n - 1 - static_cast<double>(k));
        if (r_out) r_out->push_back(r);
        num += r / static_cast<double>(k);
        den += 1.0 / static_cast<double>(k);
    }
    return num / den;
}

/// k-mer counts via a substring dictionary.
inline std::map<std::string, int> oracle_kmers(const std::string& s, std::size_t k) {
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i + k <= s.size(); ++i) {
        ++counts[s.substr(i, k)];
    }
    return counts;
}

/// KL(P || Q(Y)) summed scalar by scalar, no floor needed for these sizes.
inline double oracle_kl(const ksne::Matrix& p, const ksne::Matrix& y) {
    const std::size_t n = p.rows();
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y(i, 0) - y(j, 0);
            const double dy = y(i, 1) - y(j, 1);
            z += 1.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || p(i, j) == 0.0) continue;
            const double dx = y(i, 0) - y(j, 0);
            const double dy = y(i, 1) - y(j, 1);
            const double q = 1.0 / (1.0 + dx * dx + dy * dy) / z;
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

/// Ranks (0-based, no ties expected) of a sequence.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) { ma += a[i]; mb += b[i]; }
    ma /= n; mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/**
 * Circular-order agreement between a generating index order (point i at
 * angle 2*pi*i/n) and the angles of an N x 2 embedding around its centroid.
 * Angles on a circle have no canonical origin or direction, so the Spearman
 * correlation is maximized (in absolute value) over the starting point and
 * both directions of travel.
 */
inline double circular_spearman(const ksne::Matrix& y) {
    const std::size_t n = y.rows();
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < n; ++i) { cx += y(i, 0); cy += y(i, 1); }
    cx /= static_cast<double>(n); cy /= static_cast<double>(n);
    std::vector<double> angle(n);
    for (std::size_t i = 0; i < n; ++i) angle[i] = std::atan2(y(i, 1) - cy, y(i, 0) - cx);
    const std::vector<double> angle_rank = ranks(angle);
    double best = 0.0;
    std::vector<double> shifted(n), index(n);
    for (std::size_t i = 0; i < n; ++i) index[i] = static_cast<double>(i);
    for (std::size_t start = 0; start < n; ++start) {
        // Rotate the angular ranks so that point `start` becomes rank 0.
        const double offset = angle_rank[start];
        for (std::size_t i = 0; i < n; ++i) {
            shifted[i] = std::fmod(angle_rank[i] - offset + static_cast<double>(n), static_cast<double>(n));
        }
        // Index order starting from the same point, in both directions
        // (a reflected embedding runs the circle backwards).
        for (std::size_t i = 0; i < n; ++i) {
            index[i] = static_cast<double>((i + n - start) % n);
        }
        best = std::max(best, std::abs(correlation(shifted, index)));
        for (std::size_t i = 0; i < n; ++i) {
            index[i] = static_cast<double>((start + n - i) % n);
        }
        best = std::max(best, std::abs(correlation(shifted, index)));
    }
    return best;
}

// ---- strict XML well-formedness --------------------------------------------

/**
 * Minimal strict XML checker: one root element, properly nested and
 * matched tags, quoted unique attributes, only the five predefined or
 * numeric entities, no stray '<' or '&'. Returns an empty string when the
 * document is well formed, otherwise a description of the first problem.
 */
inline std::string xml_problem(const std::string& doc) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool seen_root = false;
    auto is_name_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':'; };
    auto is_name_char = [&](char c) {
        return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    };
    auto check_text = [&](std::size_t from, std::size_t to) -> std::string {
        for (std::size_t p = from; p < to; ++p) {
            if (doc[p] == '&') {
                const std::size_t semi = doc.find(';', p);
                if (semi == std::string::npos || semi > to) return "unterminated entity";
                const std::string ent = doc.substr(p + 1, semi - p - 1);
                const bool named = ent == "amp" || ent == "lt" || ent == "gt" || ent == "quot" || ent == "apos";
                const bool numeric = ent.size() > 1 && ent[0] == '#';
                if (!named && !numeric) return "unknown entity &" + ent + ";";
                p = semi;
            } else if (doc[p] == '<') {
                return "stray '<'";
            }
        }
        return {};
    };
    while (i < doc.size()) {
        const std::size_t lt = doc.find('<', i);
        const std::size_t text_end = lt == std::string::npos ? doc.size() : lt;
        if (auto e = check_text(i, text_end); !e.empty()) return e;
        if (stack.empty()) {
            for (std::size_t p = i; p < text_end; ++p) {
                if (!std::isspace(static_cast<unsigned char>(doc[p]))) return "text outside the root element";
            }
        }
        if (lt == std::string::npos) break;
        i = lt;
        if (doc.compare(i, 5, "<?xml") == 0) {
            if (seen_root || i != 0) return "misplaced XML declaration";
            const std::size_t end = doc.find("?>", i);
            if (end == std::string::npos) return "unterminated declaration";
            i = end + 2;
            continue;
        }
        if (doc.compare(i, 4, "<!--") == 0) {
            const std::size_t end = doc.find("-->", i + 4);
            if (end == std::string::npos) return "unterminated comment";
            i = end + 3;
            continue;
        }
        if (doc.compare(i, 2, "</") == 0) {
            std::size_t p = i + 2;
            const std::size_t start = p;
            while (p < doc.size() && is_name_char(doc[p])) ++p;
            const std::string name = doc.substr(start, p - start);
            while (p < doc.size() && std::isspace(static_cast<unsigned char>(doc[p]))) ++p;
            if (p >= doc.size() || doc[p] != '>') return "malformed end tag";
            if (stack.empty() || stack.back() != name) return "mismatched end tag </" + name + ">";
            stack.pop_back();
            i = p + 1;
            continue;
        }
        std::size_t p = i + 1;
        if (p >= doc.size() || !is_name_start(doc[p])) return "malformed start tag";
        const std::size_t start = p;
        while (p < doc.size() && is_name_char(doc[p])) ++p;
        const std::string name = doc.substr(start, p - start);
        if (stack.empty()) {
            if (seen_root) return "second root element <" + name + ">";
            seen_root = true;
        }
        std::vector<std::string> attrs;
        while (true) {
            const std::size_t before = p;
            while (p < doc.size() && std::isspace(static_cast<unsigned char>(doc[p]))) ++p;
            if (p >= doc.size()) return "unterminated tag <" + name + ">";
            if (doc[p] == '>') {
                stack.push_back(name);
                i = p + 1;
                break;
            }
            if (doc.compare(p, 2, "/>") == 0) {
                i = p + 2;
                break;
            }
            if (p == before) return "attributes must be separated by whitespace in <" + name + ">";
            const std::size_t astart = p;
            if (!is_name_start(doc[p])) return "bad attribute name in <" + name + ">";
            while (p < doc.size() && is_name_char(doc[p])) ++p;
            const std::string attr = doc.substr(astart, p - astart);
            if (std::find(attrs.begin(), attrs.end(), attr) != attrs.end()) return "duplicate attribute " + attr;
            attrs.push_back(attr);
            if (p >= doc.size() || doc[p] != '=') return "attribute " + attr + " without value";
            ++p;
            if (p >= doc.size() || (doc[p] != '"' && doc[p] != '\'')) return "unquoted attribute " + attr;
            const char quote = doc[p];
            const std::size_t close = doc.find(quote, p + 1);
            if (close == std::string::npos) return "unterminated attribute " + attr;
            if (auto e = check_text(p + 1, close); !e.empty()) return e + " in attribute " + attr;
            p = close + 1;
        }
    }
    if (!seen_root) return "no root element";
    if (!stack.empty()) return "unclosed element <" + stack.back() + ">";
    return {};
}

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + needle.size())) {
        ++count;
    }
    return count;
}

// FASTA text of `n` protein-like sequences: each family mutates its own
// random ancestor at `mutation` rate. Headers are ">s<i>|fam<f>".
inline std::string family_fasta(std::size_t n, std::size_t families, std::size_t length, double mutation,
                                unsigned seed) {
    static const std::string residues = "ACDEFGHIKLMNPQRSTVWY";
    std::mt19937 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, residues.size() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::string> ancestors(families);
    for (auto& a : ancestors) {
        for (std::size_t j = 0; j < length; ++j) a += residues[pick(gen)];
    }
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string s = ancestors[i % families];
        for (char& c : s) {
            if (u(gen) < mutation) c = residues[pick(gen)];
        }
        out += ">s" + std::to_string(i) + "|fam" + std::to_string(i % families) + "\n" + s + "\n";
    }
    return out;
}

}  // namespace testing

#endif
