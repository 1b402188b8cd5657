#include <gtest/gtest.h>

#include "kpa/io.hpp"
#include "kpa/verifier.hpp"
#include "support.hpp"

using namespace kpa;

namespace {

// Brute force minimum with the smallest index pair as witness.
std::pair<std::size_t, std::pair<std::size_t, std::size_t>> naive_min(const PermArray& a) {
    std::size_t best = SIZE_MAX;
    std::pair<std::size_t, std::size_t> at{0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const auto d = test::naive_kendall(a[i], a[j]);
            if (d < best) {
                best = d;
                at = {i, j};
            }
        }
    }
    return {best, at};
}

}  // namespace

TEST(Verifier, AgreesWithBruteForce) {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = 5 + rng.below(8);  // n! comfortably exceeds count
        PermArray a(n, "random");
        const auto count = 2 + rng.below(40);
        while (a.size() < count) a.add(test::random_permutation(n, rng));
        for (std::size_t workers : {1, 3}) {
            VerifyOptions opts;
            opts.workers = workers;
            const auto r = min_pairwise_distance(a, opts);
            const auto [d, at] = naive_min(a);
            EXPECT_EQ(r.min_distance, d);
            ASSERT_TRUE(r.witness.has_value());
            EXPECT_EQ(*r.witness, at);
        }
    }
}

TEST(Verifier, SingletonUsesSentinel) {
    PermArray a(5, "one");
    a.add(Permutation::identity(5));
    const auto r = certify(a, 10);
    EXPECT_EQ(r.min_distance, 11U);
    EXPECT_FALSE(r.witness.has_value());
    EXPECT_TRUE(r.passed);
}

TEST(Verifier, EmptyArrayThrows) {
    EXPECT_THROW(min_pairwise_distance(PermArray(4, "")), std::domain_error);
}

TEST(Verifier, CertifyThreshold) {
    PermArray a(4, "");
    a.add(Permutation{0, 1, 2, 3});
    a.add(Permutation{1, 0, 3, 2});
    EXPECT_TRUE(certify(a, 2).passed);
    const auto r = certify(a, 3);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.min_distance, 2U);
    EXPECT_EQ(r.witness, (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(Verifier, RestrictionViolationFails) {
    PermArray a(5, "");
    a.add(Permutation{3, 4, 0, 1, 2});
    a.add(Permutation{1, 0, 2, 3, 4});
    a.set_restriction_m(2);
    const auto r = certify(a, 1);
    EXPECT_FALSE(r.restriction_ok);
    EXPECT_EQ(r.restriction_violation, 1U);
    EXPECT_FALSE(r.passed);
}

TEST(Verifier, DuplicatesAreDroppedAndCounted) {
    PermArray a(3, "");
    EXPECT_TRUE(a.add(Permutation{0, 1, 2}));
    EXPECT_FALSE(a.add(Permutation{0, 1, 2}));
    EXPECT_EQ(a.size(), 1U);
    EXPECT_EQ(a.duplicates(), 1U);
}

TEST(Verifier, SizeGuard) {
    PermArray a(8, "");
    for (const auto& p : test::all_permutations(8)) {
        if (a.size() == 30) break;
        a.add(p);
    }
    VerifyOptions opts;
    opts.size_guard = 10;
    EXPECT_THROW(min_pairwise_distance(a, opts), std::domain_error);
    opts.allow_large = true;
    EXPECT_NO_THROW(min_pairwise_distance(a, opts));
}

TEST(Verifier, FullSymmetricGroupHasDistanceOne) {
    PermArray a(5, "");
    for (const auto& p : test::all_permutations(5)) a.add(p);
    EXPECT_EQ(min_pairwise_distance(a).min_distance, 1U);
}

TEST(Verifier, PublishedSmallArrays) {
    EXPECT_TRUE(certify(read_array_file(test::data_path("arrays/t14_2_11_placements.txt")), 11).passed);
    EXPECT_TRUE(certify(read_array_file(test::data_path("arrays/t9_2_10.txt")), 10).passed);
    EXPECT_TRUE(certify(read_array_file(test::data_path("arrays/t12_2_10.txt")), 10).passed);
    EXPECT_TRUE(certify(read_array_file(test::data_path("arrays/t13_2_11.txt")), 11).passed);
    EXPECT_TRUE(certify(read_array_file(test::data_path("arrays/p5_2_3.txt")), 3).passed);
}

TEST(Verifier, PrintedFourteenSymbolTableFallsShort) {
    // The last row has 13 and 14 swapped relative to its pinned placement.
    const auto a = read_array_file(test::data_path("arrays/t14_2_11.txt"));
    const auto r = certify(a, 11);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.min_distance, 10U);
    EXPECT_EQ(r.witness, (std::pair<std::size_t, std::size_t>{1, 4}));
}

TEST(Verifier, PrintedTenSymbolListingFallsShort) {
    // As printed the 21-string listing has pairs at distance 2.
    const auto a = read_array_file(test::data_path("arrays/p10_2_3_listing.txt"));
    EXPECT_EQ(a.size(), 21U);
    const auto r = certify(a, 3);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.min_distance, 2U);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(kendall_distance(a[r.witness->first], a[r.witness->second]), 2U);
}
