#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kpa {

using Symbol = std::uint8_t;

/// Largest supported symbol count. The maximum Kendall distance at this size
/// is 64 * 63 / 2 = 2016, so every count fits comfortably in 32 bits.
inline constexpr std::size_t kMaxSymbols = 64;

/// A permutation of {0, ..., n-1} in one-line notation: symbols()[i] = p(i).
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
        validate();
    }

    Permutation(std::initializer_list<int> symbols) {
        symbols_.reserve(symbols.size());
        for (int s : symbols) {
            if (s < 0 || s >= static_cast<int>(kMaxSymbols)) {
                throw std::domain_error("permutation symbol out of range: " + std::to_string(s));
            }
            symbols_.push_back(static_cast<Symbol>(s));
        }
        validate();
    }

    static Permutation identity(std::size_t n) {
        std::vector<Symbol> s(n);
        std::iota(s.begin(), s.end(), Symbol{0});
        return Permutation(std::move(s));
    }

    static Permutation reversal(std::size_t n) {
        std::vector<Symbol> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<Symbol>(n - 1 - i);
        }
        return Permutation(std::move(s));
    }

    /// Builds from integers, rejecting anything that is not a bijection.
    static Permutation from_ints(std::span<const int> values) {
        std::vector<Symbol> s;
        s.reserve(values.size());
        for (int v : values) {
            if (v < 0 || v >= static_cast<int>(kMaxSymbols)) {
                throw std::domain_error("permutation symbol out of range: " + std::to_string(v));
            }
            s.push_back(static_cast<Symbol>(v));
        }
        return Permutation(std::move(s));
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    Symbol operator[](std::size_t i) const noexcept { return symbols_[i]; }
    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    bool is_identity() const noexcept {
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (symbols_[i] != i) {
                return false;
            }
        }
        return true;
    }

    /// Position of every symbol: positions()[s] = i iff p(i) = s.
    std::vector<Symbol> positions() const {
        std::vector<Symbol> pos(symbols_.size());
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            pos[symbols_[i]] = static_cast<Symbol>(i);
        }
        return pos;
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (i != 0) {
                out.push_back(' ');
            }
            out += std::to_string(symbols_[i]);
        }
        return out;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend std::strong_ordering operator<=>(const Permutation& a, const Permutation& b) {
        return std::lexicographical_compare_three_way(a.symbols_.begin(), a.symbols_.end(),
                                                      b.symbols_.begin(), b.symbols_.end());
    }

private:
    void validate() const {
        const auto n = symbols_.size();
        if (n == 0 || n > kMaxSymbols) {
            throw std::domain_error("permutation length must be in [1, 64], got " + std::to_string(n));
        }
        std::array<bool, kMaxSymbols> seen{};
        for (Symbol s : symbols_) {
            if (s >= n || seen[s]) {
                throw std::domain_error("not a permutation of 0.." + std::to_string(n - 1) + ": " +
                                        to_string());
            }
            seen[s] = true;
        }
    }

    std::vector<Symbol> symbols_;
};

struct PermutationHash {
    std::size_t operator()(const Permutation& p) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (Symbol s : p.symbols()) {
            h = (h ^ s) * 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

namespace detail {

inline void require_same_length(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) {
        throw std::domain_error("permutation length mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
}

/// Inversion count of values[0..n) by bottom-up merge counting; sorts in place.
inline std::uint32_t count_inversions(Symbol* values, std::size_t n) {
    std::array<Symbol, kMaxSymbols> buffer;
    std::uint32_t inversions = 0;
    Symbol* src = values;
    Symbol* dst = buffer.data();
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo;
            std::size_t j = mid;
            std::size_t k = lo;
            while (i < mid && j < hi) {
                if (src[j] < src[i]) {
                    inversions += static_cast<std::uint32_t>(mid - i);
                    dst[k++] = src[j++];
                } else {
                    dst[k++] = src[i++];
                }
            }
            while (i < mid) dst[k++] = src[i++];
            while (j < hi) dst[k++] = src[j++];
        }
        std::swap(src, dst);
    }
    return inversions;
}

/// Distance given the position table of sigma and the symbols of pi.
inline std::uint32_t kendall_from_positions(std::span<const Symbol> sigma_positions,
                                            std::span<const Symbol> pi_symbols) {
    std::array<Symbol, kMaxSymbols> relabeled;
    const auto n = pi_symbols.size();
    for (std::size_t i = 0; i < n; ++i) {
        relabeled[i] = sigma_positions[pi_symbols[i]];
    }
    return count_inversions(relabeled.data(), n);
}

}  // namespace detail

/// Kendall-tau distance: the minimum number of adjacent transpositions that
/// turn sigma into pi. Computed in O(n log n) as the inversion count of pi
/// relabeled by the positions of its symbols in sigma.
inline std::uint32_t kendall_distance(const Permutation& sigma, const Permutation& pi) {
    detail::require_same_length(sigma, pi);
    const auto pos = sigma.positions();
    return detail::kendall_from_positions(pos, pi.symbols());
}

inline std::uint32_t max_kendall_distance(std::size_t n) {
    return static_cast<std::uint32_t>(n * (n - 1) / 2);
}

inline Permutation inverse(const Permutation& p) { return Permutation(p.positions()); }

/// compose(p, q)(i) = p(q(i)).
inline Permutation compose(const Permutation& p, const Permutation& q) {
    detail::require_same_length(p, q);
    std::vector<Symbol> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[q[i]];
    }
    return Permutation(std::move(out));
}

enum class Parity { even, odd };

inline std::uint32_t inversion_count(const Permutation& p) {
    std::array<Symbol, kMaxSymbols> copy;
    std::copy(p.symbols().begin(), p.symbols().end(), copy.begin());
    return detail::count_inversions(copy.data(), p.size());
}

inline Parity parity(const Permutation& p) {
    return inversion_count(p) % 2 == 0 ? Parity::even : Parity::odd;
}

/// Exact breadth-first search over the adjacent-transposition graph, used as
/// ground truth for the distance convention. Refuses n > 8.
class BfsDistanceOracle {
public:
    static constexpr std::size_t kMaxN = 8;

    /// Explores the whole graph from `source` once; distance() is then O(n^2).
    explicit BfsDistanceOracle(const Permutation& source) : n_(source.size()) {
        if (n_ > kMaxN) {
            throw std::domain_error("BFS oracle refuses n > 8 (state space guard)");
        }
        std::size_t states = 1;
        for (std::size_t k = 2; k <= n_; ++k) states *= k;
        depth_.assign(states, -1);

        std::vector<Symbol> cur(source.symbols().begin(), source.symbols().end());
        std::deque<std::vector<Symbol>> frontier;
        depth_[rank(cur)] = 0;
        frontier.push_back(cur);
        while (!frontier.empty()) {
            cur = std::move(frontier.front());
            frontier.pop_front();
            const auto here = depth_[rank(cur)];
            for (std::size_t i = 0; i + 1 < n_; ++i) {
                std::swap(cur[i], cur[i + 1]);
                auto& slot = depth_[rank(cur)];
                if (slot < 0) {
                    slot = static_cast<std::int16_t>(here + 1);
                    frontier.push_back(cur);
                }
                std::swap(cur[i], cur[i + 1]);
            }
        }
    }

    std::uint32_t distance(const Permutation& target) const {
        if (target.size() != n_) {
            throw std::domain_error("permutation length mismatch in BFS oracle");
        }
        std::vector<Symbol> t(target.symbols().begin(), target.symbols().end());
        return static_cast<std::uint32_t>(depth_[rank(t)]);
    }

private:
    // Lehmer-code rank in [0, n!).
    std::size_t rank(const std::vector<Symbol>& p) const {
        std::size_t r = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t smaller = 0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                smaller += p[j] < p[i] ? 1 : 0;
            }
            r = r * (n_ - i) + smaller;
        }
        return r;
    }

    std::size_t n_;
    std::vector<std::int16_t> depth_;
};

inline std::uint32_t bfs_distance_oracle(const Permutation& sigma, const Permutation& pi) {
    detail::require_same_length(sigma, pi);
    return BfsDistanceOracle(sigma).distance(pi);
}

/// Parses "0 5 3 1 4 6 2 7" (any whitespace). Symbols are taken as given;
/// see io.hpp for 1-based normalization.
inline std::vector<int> parse_symbols(std::string_view text) {
    std::vector<int> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',' ||
                                   text[i] == '\r' || text[i] == '\n')) {
            ++i;
        }
        if (i == text.size()) break;
        std::size_t j = i;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
        if (j == i) {
            throw std::domain_error("unexpected character in permutation: '" + std::string(1, text[i]) + "'");
        }
        out.push_back(std::stoi(std::string(text.substr(i, j - i))));
        i = j;
    }
    return out;
}

}  // namespace kpa
