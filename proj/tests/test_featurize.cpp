#include <doctest.h>

#include <numeric>
#include <random>

#include "helpers.hpp"
#include "ksne/error.hpp"
#include "ksne/featurize.hpp"

using namespace ksne;

namespace {

std::size_t oracle_slot(const std::string& kmer, const Alphabet& a) {
    std::size_t slot = 0;
    for (char c : kmer) {
        slot = slot * a.size() + static_cast<std::size_t>(a.index(c));
    }
    return slot;
}

std::string first_symbols(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s += static_cast<char>('A' + i);
    }
    return s;
}

}  // namespace

TEST_CASE("alphabet inference is sorted and distinct") {
    const auto a = infer_alphabet({{"1", "BA", "x"}, {"2", "AC", "y"}});
    CHECK(a.symbols() == "ABC");
    CHECK(a.index('C') == 2);
    CHECK(a.index('Z') == -1);
    CHECK_THROWS_AS(Alphabet("AA"), Error);
}

TEST_CASE("spectrum: distinct windows") {
    const Alphabet protein("ACDEFGHIKLMNPQRSTVWY");
    const auto v = kmer_spectrum("MFVF", 3, protein);
    CHECK(v.size() == 8000);
    CHECK(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }) == 2);
    CHECK(v[oracle_slot("MFV", protein)] == 1.0);
    CHECK(v[oracle_slot("FVF", protein)] == 1.0);
}

TEST_CASE("spectrum: repeated k-mer accumulates") {
    const auto v = kmer_spectrum("AAAA", 2, Alphabet("A"));
    CHECK(v == std::vector<double>{3.0});
}

TEST_CASE("spectrum: 24-symbol alphabet gives 13824 slots") {
    const Alphabet a(first_symbols(24));
    const auto v = kmer_spectrum("ACD", 3, a);
    CHECK(v.size() == 13824);
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == 1.0);
}

TEST_CASE("spectrum: errors") {
    const Alphabet a("ACGT");
    try {
        kmer_spectrum("ACXT", 2, a);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::featurization);
        CHECK(std::string(e.what()).find('X') != std::string::npos);
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
    try {
        kmer_spectrum("AC", 3, a);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::argument);
    }
}

TEST_CASE("spectrum agrees with a dictionary oracle") {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t sigma = 1 + gen() % 6;
        const std::size_t k = 1 + gen() % 3;
        const std::size_t len = k + gen() % (51 - k);
        const std::string symbols = first_symbols(sigma);
        std::string s;
        for (std::size_t i = 0; i < len; ++i) {
            s += symbols[gen() % sigma];
        }
        const Alphabet a(symbols);
        const auto v = kmer_spectrum(s, k, a);
        std::vector<double> expected(v.size(), 0.0);
        for (const auto& [kmer, count] : testing::oracle_kmers(s, k)) {
            expected[oracle_slot(kmer, a)] = count;
        }
        CHECK(v == expected);
        CHECK(std::accumulate(v.begin(), v.end(), 0.0) == static_cast<double>(len - k + 1));
    }
}

TEST_CASE("feature matrix") {
    const std::optional<Alphabet> protein = Alphabet("ACDEFGHIKLMNPQRSTVWY");
    SUBCASE("rows sum to window counts") {
        const auto f = build_feature_matrix({{"a", "MFVF", "x"}, {"b", "FVFM", "y"}}, 3, protein);
        CHECK(f.values.rows() == 2);
        CHECK(f.values.cols() == 8000);
        for (std::size_t r = 0; r < 2; ++r) {
            const auto row = f.values.row(r);
            CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 2.0);
        }
    }
    SUBCASE("k equal to length is one-hot") {
        const auto f = build_feature_matrix({{"a", "MFVF", "x"}}, 4, protein);
        const auto row = f.values.row(0);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == 1.0);
        CHECK(std::count(row.begin(), row.end(), 1.0) == 1);
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(build_feature_matrix({}, 3), Error);
    }
    SUBCASE("errors carry the record id") {
        try {
            build_feature_matrix({{"good", "MFVF", "x"}, {"bad", "MF", "y"}}, 3, protein);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("bad") != std::string::npos);
        }
    }
    SUBCASE("permuting records permutes rows") {
        const std::vector<SequenceRecord> recs{{"a", "MFVFA", "x"}, {"b", "CDEFG", "y"}, {"c", "WYWYW", "z"}};
        const auto f = build_feature_matrix(recs, 2, protein);
        const auto g = build_feature_matrix({recs[2], recs[0], recs[1]}, 2, protein);
        const std::size_t map[3] = {2, 0, 1};
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(std::equal(g.values.row(r).begin(), g.values.row(r).end(), f.values.row(map[r]).begin()));
        }
    }
}

TEST_CASE("spectrum dimension") {
    CHECK(spectrum_dimension(20, 3) == 8000);
    CHECK(spectrum_dimension(24, 3) == 13824);
    CHECK(spectrum_dimension(4, 1) == 4);
    CHECK_THROWS_AS(spectrum_dimension(24, 10), Error);
}
