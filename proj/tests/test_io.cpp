#include <gtest/gtest.h>

#include <sstream>

#include "kpa/io.hpp"
#include "support.hpp"

using namespace kpa;

TEST(Io, OneBasedIsNormalised) {
    EXPECT_EQ(parse_permutation("1 3 2"), (Permutation{0, 2, 1}));
    EXPECT_EQ(parse_permutation("0 2 1"), (Permutation{0, 2, 1}));
}

TEST(Io, BlanksTakeMissingSymbolsInOrder) {
    EXPECT_EQ(parse_permutation("- 5 4 - -"), (Permutation{0, 4, 3, 1, 2}));
    EXPECT_EQ(parse_permutation("4 - - - 5"), (Permutation{3, 0, 1, 2, 4}));
}

TEST(Io, RejectsMixedNumbering) {
    EXPECT_THROW(parse_array("0 1 2\n1 2 3\n"), std::domain_error);
}

TEST(Io, RejectsRaggedRows) {
    EXPECT_THROW(parse_array("0 1 2\n0 1\n"), std::domain_error);
}

TEST(Io, HeaderRoundTrip) {
    PermArray a(4, "unit test");
    a.add(Permutation{0, 1, 2, 3});
    a.add(Permutation{3, 2, 1, 0});
    a.set_claimed_d(6);
    a.set_restriction_m(3);
    const auto text = to_text(a, {"seed=5"});
    std::istringstream in(text);
    ArrayHeader h;
    const auto b = read_array(in, &h);
    EXPECT_EQ(b.size(), 2U);
    EXPECT_EQ(b[1], (Permutation{3, 2, 1, 0}));
    EXPECT_EQ(h.n, 4U);
    EXPECT_EQ(h.d, 6U);
    EXPECT_EQ(h.m, 3U);
    EXPECT_EQ(h.provenance, "unit test");
    EXPECT_EQ(h.extra.at("seed"), "5");
}

TEST(Io, ExplicitBaseOverridesDetection) {
    // Without base=1 a row lacking n reads as 0-based.
    const auto a = parse_array("# base=1\n2 1 3\n");
    EXPECT_EQ(a[0], (Permutation{1, 0, 2}));
}

TEST(Io, PatternNotation) {
    const auto p = parse_permutation("- - 9 - - - 10 - - -");
    EXPECT_EQ(to_pattern(p, 2), "- - 9 - - - 10 - - -");
}

TEST(Io, ShippedArraysLoad) {
    for (const char* f : {"arrays/t14_2_11.txt", "arrays/t9_2_10.txt", "arrays/t12_2_10.txt", "arrays/t13_2_11.txt",
                          "arrays/p5_2_3.txt", "arrays/p10_2_3_listing.txt",
                          "arrays/t14_2_11_placements.txt"}) {
        ArrayHeader h;
        const auto a = read_array_file(test::data_path(f), &h);
        EXPECT_GT(a.size(), 0U) << f;
        ASSERT_TRUE(h.m.has_value()) << f;
        for (const auto& p : a) EXPECT_TRUE(in_sorted_restriction(p, *h.m)) << f << ": " << p.to_string();
    }
}
