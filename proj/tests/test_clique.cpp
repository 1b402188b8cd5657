#include <gtest/gtest.h>

#include "kpa/clique.hpp"
#include "kpa/constructions.hpp"
#include "kpa/search.hpp"
#include "kpa/verifier.hpp"
#include "support.hpp"

using namespace kpa;

namespace {

// Exhaustive subset search; fine for up to ~20 vertices.
std::size_t brute_clique(const BitGraph& g) {
    const auto n = g.size();
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        if (size <= best) continue;
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (!((mask >> a) & 1U)) continue;
            for (std::size_t b = a + 1; b < n && ok; ++b) {
                if (((mask >> b) & 1U) && !g.adjacent(a, b)) ok = false;
            }
        }
        if (ok) best = size;
    }
    return best;
}

}  // namespace

TEST(Clique, SolverMatchesBruteForceOnRandomGraphs) {
    Rng rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = 1 + rng.below(16);
        const auto density = 20 + rng.below(70);
        BitGraph g(n);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng.below(100) < density) g.connect(a, b);
            }
        }
        const auto clique = MaxCliqueSolver(g).solve();
        for (std::size_t i = 0; i < clique.size(); ++i) {
            for (std::size_t j = i + 1; j < clique.size(); ++j) ASSERT_TRUE(g.adjacent(clique[i], clique[j]));
        }
        EXPECT_EQ(clique.size(), brute_clique(g));
    }
}

TEST(Clique, SmallExactOptima) {
    EXPECT_EQ(clique_exact(SearchSpace::full(4), 1).size(), 24U);
    EXPECT_EQ(clique_exact(SearchSpace::full(4), 2).size(), 12U);
    EXPECT_EQ(clique_exact(SearchSpace::full(4), 6).size(), 2U);
    const auto s52 = clique_exact(SearchSpace::restricted_sorted(5, 2), 3);
    EXPECT_EQ(s52.size(), 6U);
    EXPECT_EQ(s52.restriction_m(), 2U);
    EXPECT_EQ(clique_exact(SearchSpace::restricted_sorted(10, 1), 3).size(), 4U);
}

TEST(Clique, RestrictedSpacesAgreeWithExhaustiveSubsets) {
    for (std::size_t n : {4, 5}) {
        const auto space = SearchSpace::restricted_sorted(n, 2);
        std::vector<Permutation> members;
        space.for_each([&](const Permutation& p) {
            members.push_back(p);
            return true;
        });
        for (std::size_t d = 1; d <= max_kendall_distance(n); ++d) {
            BitGraph g(members.size());
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    if (test::naive_kendall(members[i], members[j]) >= d) g.connect(i, j);
                }
            }
            EXPECT_EQ(clique_exact(space, d).size(), std::max<std::size_t>(brute_clique(g), 1)) << n << " " << d;
        }
    }
}

TEST(Clique, GreedyNeverExceedsOptimum) {
    Rng rng(4);
    for (std::size_t d = 1; d <= 6; ++d) {
        const auto opt = clique_exact(SearchSpace::full(4), d).size();
        for (int k = 0; k < 10; ++k) {
            EXPECT_LE(random_greedy(SearchSpace::full(4), d, rng.below(4), rng.next()).size(), opt);
        }
    }
    const auto space = SearchSpace::restricted_sorted(7, 2);
    for (std::size_t d = 2; d <= 8; ++d) {
        const auto opt = clique_exact(space, d).size();
        EXPECT_LE(best_of_restarts(space, d, 20, d).size(), opt);
    }
}

TEST(Clique, TwoSymbolOptimumAtTen) {
    // Exact optimum over S_{10,2} at distance 3.
    const auto a = clique_exact(SearchSpace::restricted_sorted(10, 2), 3);
    EXPECT_TRUE(certify(a, 3).passed);
    EXPECT_EQ(a.size(), 21U);  // the size of the 21-string listing; pattern_d3(10) gives 18
    EXPECT_GT(a.size(), pattern_d3(10).size());
}

TEST(Clique, Guard) {
    EXPECT_THROW(clique_exact(SearchSpace::full(8), 3), std::domain_error);
    EXPECT_THROW(clique_exact(SearchSpace::full(4), 0), std::domain_error);
}
