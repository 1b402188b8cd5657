#include <gtest/gtest.h>

#include <map>
#include <set>

#include "kpa/search.hpp"
#include "kpa/verifier.hpp"
#include "support.hpp"

using namespace kpa;

TEST(SearchSpace, Sizes) {
    EXPECT_EQ(SearchSpace::full(5).size(), 120U);
    EXPECT_EQ(SearchSpace::restricted_sorted(6, 2).size(), 30U);
    EXPECT_EQ(SearchSpace::fixed_positions(6, {{0, 5}, {3, 4}}).size(), 24U);
    EXPECT_EQ(SearchSpace::full(40).size(), UINT64_MAX);
    EXPECT_THROW(SearchSpace::restricted_sorted(5, 5), std::domain_error);
    EXPECT_THROW(SearchSpace::fixed_positions(6, {{0, 5}, {0, 4}}), std::domain_error);
    EXPECT_THROW(SearchSpace::fixed_positions(6, {{0, 2}}), std::domain_error);  // not a large symbol
}

TEST(SearchSpace, EnumerationMatchesMembership) {
    const std::vector<SearchSpace> spaces{SearchSpace::full(5), SearchSpace::restricted_sorted(7, 3),
                                          SearchSpace::restricted_sorted(6, 1),
                                          SearchSpace::fixed_positions(7, {{6, 6}, {2, 5}, {0, 4}})};
    for (const auto& space : spaces) {
        std::set<Permutation> seen;
        std::vector<Permutation> order;
        space.for_each([&](const Permutation& p) {
            EXPECT_TRUE(space.contains(p)) << space.describe() << " " << p.to_string();
            seen.insert(p);
            order.push_back(p);
            return true;
        });
        EXPECT_EQ(seen.size(), space.size()) << space.describe();
        EXPECT_EQ(order.size(), space.size()) << space.describe();
        // Independent membership count over the whole symmetric group.
        std::size_t members = 0;
        for (const auto& p : test::all_permutations(space.n())) members += space.contains(p) ? 1 : 0;
        EXPECT_EQ(members, space.size()) << space.describe();
    }
}

TEST(SearchSpace, FullOrderIsLexicographic) {
    std::vector<Permutation> order;
    SearchSpace::full(4).for_each([&](const Permutation& p) {
        order.push_back(p);
        return true;
    });
    EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
}

TEST(SearchSpace, PositionOrderCoversSpaceInInverseOrder) {
    const std::vector<SearchSpace> spaces{SearchSpace::full(5), SearchSpace::restricted_sorted(7, 3),
                                          SearchSpace::restricted_sorted(6, 1),
                                          SearchSpace::fixed_positions(7, {{6, 6}, {2, 5}, {0, 4}})};
    for (const auto& space : spaces) {
        std::vector<Permutation> order;
        space.for_each_by_positions([&](const Permutation& p) {
            EXPECT_TRUE(space.contains(p)) << space.describe() << " " << p.to_string();
            order.push_back(p);
            return true;
        });
        EXPECT_EQ(std::set<Permutation>(order.begin(), order.end()).size(), space.size()) << space.describe();
        EXPECT_EQ(order.size(), space.size()) << space.describe();
        std::vector<std::vector<Symbol>> tables;
        for (const auto& p : order) tables.push_back(p.positions());
        EXPECT_TRUE(std::is_sorted(tables.begin(), tables.end())) << space.describe();
    }
    std::size_t visits = 0;
    SearchSpace::full(6).for_each_by_positions([&](const Permutation&) { return ++visits < 7; });
    EXPECT_EQ(visits, 7U);
}

TEST(SearchSpace, EarlyStop) {
    std::size_t visits = 0;
    SearchSpace::full(6).for_each([&](const Permutation&) { return ++visits < 10; });
    EXPECT_EQ(visits, 10U);
}

TEST(SearchSpace, PinnedLike) {
    const Permutation tau{0, 5, 1, 2, 4, 3};
    const auto space = SearchSpace::pinned_like(tau, 2);
    EXPECT_TRUE(space.contains(tau));
    EXPECT_EQ(space.size(), 24U);
}

TEST(SearchSpace, RandomMembersAreRoughlyUniform) {
    const auto space = SearchSpace::restricted_sorted(4, 2);
    Rng rng(17);
    std::map<Permutation, int> counts;
    const int draws = 24000;
    for (int k = 0; k < draws; ++k) {
        const auto p = space.random_member(rng);
        ASSERT_TRUE(space.contains(p));
        ++counts[p];
    }
    ASSERT_EQ(counts.size(), 12U);
    for (const auto& [p, c] : counts) {
        EXPECT_GT(c, 1700) << p.to_string();
        EXPECT_LT(c, 2300) << p.to_string();
    }
}

TEST(RandomGreedy, OutputsCertifiedArrays) {
    for (std::size_t d : {2, 3, 5, 8}) {
        const auto a = random_greedy(SearchSpace::full(6), d, 3, d);
        EXPECT_TRUE(certify(a, d).passed);
        EXPECT_EQ(a.claimed_d(), d);
    }
    const auto r = random_greedy(SearchSpace::restricted_sorted(9, 2), 4, 2, 1);
    EXPECT_EQ(r.restriction_m(), 2U);
    EXPECT_TRUE(certify(r, 4).passed);
}

TEST(RandomGreedy, PureSweepIsDeterministic) {
    // No random seeds: the lexicographic sweep alone, so the seed is irrelevant.
    EXPECT_EQ(random_greedy(SearchSpace::full(5), 3, 0, 1).members(), random_greedy(SearchSpace::full(5), 3, 0, 2).members());
    EXPECT_EQ(random_greedy(SearchSpace::full(4), 1, 0, 0).size(), 24U);
}

TEST(RandomGreedy, SameSeedSameResult) {
    const auto space = SearchSpace::full(7);
    EXPECT_EQ(random_greedy(space, 9, 4, 123).members(), random_greedy(space, 9, 4, 123).members());
}

TEST(RandomGreedy, SizeGuard) {
    EXPECT_THROW(random_greedy(SearchSpace::full(14), 11, 1, 0), std::domain_error);
    EXPECT_THROW(random_greedy(SearchSpace::full(5), 0, 1, 0), std::domain_error);
}

TEST(BestOfRestarts, IsTheMaximumOverItsRestarts) {
    const auto space = SearchSpace::full(6);
    RestartOptions opts;
    opts.seed_schedule = {0, 2, 5};
    const auto best = best_of_restarts(space, 6, 9, 77, opts);
    std::size_t top = 0;
    for (std::size_t r = 0; r < 9; ++r) {
        top = std::max(top, random_greedy(space, 6, opts.seed_schedule[r % 3], derive_seed(77, r)).size());
    }
    EXPECT_EQ(best.size(), top);
    EXPECT_TRUE(certify(best, 6).passed);
}

TEST(BestOfRestarts, IndependentOfWorkerCount) {
    const auto space = SearchSpace::restricted_sorted(10, 3);
    RestartOptions one;
    one.workers = 1;
    RestartOptions three;
    three.workers = 3;
    EXPECT_EQ(best_of_restarts(space, 6, 12, 5, one).members(), best_of_restarts(space, 6, 12, 5, three).members());
}

TEST(Pnmd, SingleLargeSymbol) {
    EXPECT_EQ(pnmd_search(10, 1, 3, 5, 0).size(), 4U);  // ceil(10/3)
}

TEST(Pnmd, ReachesTheProductForm) {
    // ceil(n/d) * ceil((n-1)/d) * ...
    struct Case {
        std::size_t n, m, d, product;
    };
    for (const auto& c : {Case{8, 2, 3, 9}, Case{9, 2, 4, 6}, Case{10, 3, 4, 27}, Case{12, 2, 5, 9}}) {
        const auto a = pnmd_search(c.n, c.m, c.d, 40, 3);
        EXPECT_GE(a.size(), c.product) << c.n << "," << c.m << "," << c.d;
        EXPECT_TRUE(certify(a, c.d).passed);
    }
}
