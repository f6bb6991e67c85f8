#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "ksne/error.hpp"
#include "ksne/ingest.hpp"

using namespace ksne;

using testing::error_kind;
using testing::error_message;

TEST_CASE("fasta: single record") {
    const auto r = parse_fasta(">s1|Alpha\nMFVF\n");
    REQUIRE(r.size() == 1);
    CHECK(r[0] == SequenceRecord{"s1", "MFVF", "Alpha"});
}

TEST_CASE("fasta: multi-line bodies are concatenated") {
    const auto r = parse_fasta(">a|X\nMF\nVF\n>b|Y\nACD\n");
    REQUIRE(r.size() == 2);
    CHECK(r[0].sequence == "MFVF");
    CHECK(r[1] == SequenceRecord{"b", "ACD", "Y"});
}

TEST_CASE("fasta: empty body names the record") {
    CHECK(error_kind([] { parse_fasta(">a|X\n\n>b|Y\nACD"); }) == ErrorKind::parse);
    CHECK(error_message([] { parse_fasta(">a|X\n\n>b|Y\nACD"); }).find("'a'") != std::string::npos);
}

TEST_CASE("fasta: text before the first header reports its line") {
    const std::string msg = error_message([] { parse_fasta("\nMFVF\n>a|X\nMF\n"); });
    CHECK(error_kind([] { parse_fasta("MFVF\n"); }) == ErrorKind::parse);
    CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("fasta: header without a label uses it for both") {
    const auto r = parse_fasta(">lonely\nac gt\r\n");
    CHECK(r[0] == SequenceRecord{"lonely", "ACGT", "lonely"});
}

TEST_CASE("fasta: duplicate ids are a validation error") {
    CHECK(error_kind([] { parse_fasta(">a|X\nMF\n>a|Y\nVF\n"); }) == ErrorKind::validation);
}

TEST_CASE("fasta: write/parse round trip") {
    std::mt19937 gen(7);
    const std::string alphabet = "ACDEFGHIKLMNPQRSTVWY";
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SequenceRecord> records;
        const int n = 1 + static_cast<int>(gen() % 8);
        for (int i = 0; i < n; ++i) {
            std::string seq;
            const int len = 1 + static_cast<int>(gen() % 150);
            for (int c = 0; c < len; ++c) {
                seq += alphabet[gen() % alphabet.size()];
            }
            records.push_back({"r" + std::to_string(i), seq, "L" + std::to_string(gen() % 3)});
        }
        std::ostringstream out;
        write_fasta(out, records);
        CHECK(parse_fasta(out.str()) == records);
    }
}

TEST_CASE("labeled csv") {
    SUBCASE("one record") {
        const auto r = parse_labeled_csv("id,sequence,label\ns1,MFVF,Alpha\n");
        REQUIRE(r.size() == 1);
        CHECK(r[0] == SequenceRecord{"s1", "MFVF", "Alpha"});
    }
    SUBCASE("CRLF endings") {
        const auto r = parse_labeled_csv("id,sequence,label\r\ns1,mfvf,A\r\ns2,ACD,B\r\n");
        REQUIRE(r.size() == 2);
        CHECK(r[0].sequence == "MFVF");
        CHECK(r[1].label == "B");
    }
    SUBCASE("duplicate id names the id") {
        const auto fn = [] { parse_labeled_csv("id,sequence,label\ns1,MFVF,A\ns1,ACD,B\n"); };
        CHECK(error_kind(fn) == ErrorKind::validation);
        CHECK(error_message(fn).find("s1") != std::string::npos);
    }
    SUBCASE("empty file is a format error") {
        CHECK(error_kind([] { parse_labeled_csv(""); }) == ErrorKind::format);
    }
    SUBCASE("wrong header is a format error") {
        CHECK(error_kind([] { parse_labeled_csv("name,seq,label\ns1,MF,A\n"); }) == ErrorKind::format);
    }
    SUBCASE("round trip") {
        const std::vector<SequenceRecord> records{{"a", "MFVF", "X"}, {"b", "ACD", "Y"}};
        std::ostringstream out;
        write_labeled_csv(out, records);
        CHECK(parse_labeled_csv(out.str()) == records);
    }
}

TEST_CASE("point csv") {
    const auto d = parse_point_csv("id,x1,x2,label\np0,1.5,-2,a\np1,0,3e-3,b\n");
    CHECK(d.points.rows() == 2);
    CHECK(d.points.cols() == 2);
    CHECK(d.points(0, 1) == -2.0);
    CHECK(d.points(1, 1) == 3e-3);
    CHECK(d.labels == std::vector<std::string>{"a", "b"});
    std::ostringstream out;
    write_point_csv(out, d);
    const auto back = parse_point_csv(out.str());
    CHECK(back.points == d.points);
    CHECK(back.ids == d.ids);

    CHECK(error_kind([] { parse_point_csv("id,label\np0,a\n"); }) == ErrorKind::format);
    CHECK(error_kind([] { parse_point_csv("id,x1,label\np0,1,2,a\n"); }) != ErrorKind::io);
    CHECK(error_kind([] { parse_point_csv("id,x1,label\np0,abc,a\n"); }) == ErrorKind::format);
}

TEST_CASE("circle: zero noise quarter points") {
    const auto d = generate_circle(4, 1.0, 0.0, 0);
    const double expected[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(d.points(i, 0) - expected[i][0]) < 1e-15);
        CHECK(std::abs(d.points(i, 1) - expected[i][1]) < 1e-15);
    }
    CHECK(d.labels == std::vector<std::string>{"0", "1", "2", "3"});
}

TEST_CASE("circle: noise stays within five standard deviations") {
    const auto d = generate_circle(7000, 1.0, 0.05, 1);
    REQUIRE(d.points.rows() == 7000);
    for (std::size_t i = 0; i < 7000; ++i) {
        const double r = std::hypot(d.points(i, 0), d.points(i, 1));
        CHECK(r >= 1.0 - 5 * 0.05);
        CHECK(r <= 1.0 + 5 * 0.05);
    }
}

TEST_CASE("circle: exact radius without noise, deterministic with noise") {
    const auto d = generate_circle(101, 3.5, 0.0, 9);
    for (std::size_t i = 0; i < 101; ++i) {
        CHECK(std::abs(std::hypot(d.points(i, 0), d.points(i, 1)) - 3.5) < 1e-12);
    }
    CHECK(generate_circle(500, 1.0, 0.1, 4).points == generate_circle(500, 1.0, 0.1, 4).points);
    CHECK(!(generate_circle(500, 1.0, 0.1, 4).points == generate_circle(500, 1.0, 0.1, 5).points));
}

TEST_CASE("circle: argument checks") {
    CHECK(error_kind([] { generate_circle(2, 1.0, 0.0, 0); }) == ErrorKind::argument);
    CHECK(error_kind([] { generate_circle(10, 0.0, 0.0, 0); }) == ErrorKind::argument);
    CHECK(error_kind([] { generate_circle(10, 1.0, -1.0, 0); }) == ErrorKind::argument);
}
