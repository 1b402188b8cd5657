#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "kpa/permutation.hpp"
#include "kpa/rng.hpp"

namespace kpa::test {

inline std::string data_path(const std::string& rel) { return std::string(KPA_DATA_DIR) + "/" + rel; }

inline Permutation random_permutation(std::size_t n, Rng& rng) {
    std::vector<Symbol> s(n);
    std::iota(s.begin(), s.end(), Symbol{0});
    rng.shuffle(s.begin(), s.end());
    return Permutation(std::move(s));
}

// Quadratic pair count: pairs of symbols whose relative order differs.
inline std::size_t naive_kendall(const Permutation& a, const Permutation& b) {
    const auto pa = a.positions();
    const auto pb = b.positions();
    std::size_t count = 0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        for (std::size_t y = x + 1; y < a.size(); ++y) {
            if ((pa[x] < pa[y]) != (pb[x] < pb[y])) ++count;
        }
    }
    return count;
}

inline std::vector<Permutation> all_permutations(std::size_t n) {
    std::vector<Symbol> s(n);
    std::iota(s.begin(), s.end(), Symbol{0});
    std::vector<Permutation> out;
    do {
        out.emplace_back(s);
    } while (std::next_permutation(s.begin(), s.end()));
    return out;
}

}  // namespace kpa::test
