#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kpa/perm_array.hpp"
#include "kpa/permutation.hpp"
#include "kpa/search.hpp"
#include "kpa/verifier.hpp"

namespace kpa {

/// A member of S_{n,m} given by where its m largest symbols sit; the other
/// symbols fill the remaining positions in increasing order.
struct PatternString {
    std::size_t n = 0;
    std::vector<Pin> placements;

    Permutation expand() const {
        std::vector<Symbol> s(n);
        std::vector<bool> taken(n, false);
        const auto m = placements.size();
        std::vector<bool> used(n, false);
        for (const auto& pin : placements) {
            if (pin.position >= n || taken[pin.position] || pin.symbol < n - m || pin.symbol >= n ||
                used[pin.symbol]) {
                throw std::domain_error("pattern placements must be injective over the m largest symbols");
            }
            s[pin.position] = pin.symbol;
            taken[pin.position] = true;
            used[pin.symbol] = true;
        }
        Symbol next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) s[i] = next++;
        }
        return Permutation(std::move(s));
    }
};

/// Two-large-symbol pattern: `lead` small symbols, then `first`, then `gap`
/// small symbols, then `second`, then the rest. 0-based symbols.
inline Permutation two_symbol_pattern(std::size_t n, std::size_t lead, Symbol first, std::size_t gap, Symbol second) {
    if (lead + gap > n - 2) {
        throw std::domain_error("pattern gaps exceed the string length");
    }
    return PatternString{n, {{lead, first}, {lead + gap + 1, second}}}.expand();
}

namespace detail {

inline PermArray certified(PermArray a, std::size_t d) {
    a.set_claimed_d(d);
    if (a.size() >= 2) {
        const auto report = certify(a, d);
        if (!report.passed) {
            throw std::logic_error("construction '" + a.provenance() + "' failed certification at d=" +
                                   std::to_string(d) + " (min distance " + std::to_string(report.min_distance) +
                                   ")");
        }
    }
    return a;
}

inline std::size_t require_claimed_d(const PermArray& a, const char* what) {
    if (!a.claimed_d()) {
        throw std::domain_error(std::string(what) + " needs an input array with a claimed distance");
    }
    return *a.claimed_d();
}

}  // namespace detail

/// Keeps the larger inversion-parity class of an array certified at odd d.
/// Same-parity permutations are at even distance, so the result certifies at d+1.
inline PermArray halve_even(const PermArray& a) {
    const auto d = detail::require_claimed_d(a, "halve_even");
    if (d % 2 == 0) {
        throw std::domain_error("halve_even needs an odd input distance, got " + std::to_string(d));
    }
    PermArray even(a.n()), odd(a.n());
    for (const auto& p : a) {
        (parity(p) == Parity::even ? even : odd).add(p);
    }
    auto& pick = odd.size() > even.size() ? odd : even;
    pick.set_provenance("halve_even(" + a.provenance() + ")");
    return detail::certified(std::move(pick), d + 1);
}

/// Inserts the new largest symbol at 1-based positions 1, d+1, 2d+1, ... <= n+1
/// into every member: ceil((n+1)/d) * |a| permutations on n+1 symbols.
inline PermArray insert_symbol(const PermArray& a) {
    const auto d = detail::require_claimed_d(a, "insert_symbol");
    const auto n = a.n();
    if (n + 1 > kMaxSymbols) {
        throw std::domain_error("insert_symbol would exceed 64 symbols");
    }
    PermArray out(n + 1, "insert_symbol(" + a.provenance() + ")");
    for (const auto& p : a) {
        for (std::size_t pos = 0; pos <= n; pos += d) {
            std::vector<Symbol> s(p.symbols().begin(), p.symbols().end());
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<Symbol>(n));
            out.add(Permutation(std::move(s)));
        }
    }
    return detail::certified(std::move(out), d);
}

/// Replaces the sorted small symbols of `outer_member` (position order) by the
/// sequence `inner`.
inline Permutation substitute(const Permutation& outer_member, std::size_t m, const Permutation& inner) {
    const auto n = outer_member.size();
    if (inner.size() + m != n) {
        throw std::domain_error("inner permutation must have n - m symbols");
    }
    std::vector<Symbol> s(outer_member.symbols().begin(), outer_member.symbols().end());
    std::size_t k = 0;
    for (auto& x : s) {
        if (x < n - m) x = inner[k++];
    }
    return Permutation(std::move(s));
}

/// Product construction: every outer member of an (n,m,d)-array combined with
/// every member of an (n-m,d)-array. Size |outer| * |inner|.
inline PermArray compose_arrays(const PermArray& outer, const PermArray& inner) {
    const auto d = detail::require_claimed_d(outer, "compose");
    if (!outer.restriction_m()) {
        throw std::domain_error("compose needs an outer array with a restriction m");
    }
    const auto m = *outer.restriction_m();
    if (inner.n() + m != outer.n()) {
        throw std::domain_error("compose: inner array has " + std::to_string(inner.n()) + " symbols, expected " +
                                std::to_string(outer.n() - m));
    }
    if (const auto inner_d = inner.claimed_d(); inner_d && *inner_d < d) {
        throw std::domain_error("compose: inner array distance is below the outer distance");
    }
    for (const auto& p : outer) {
        if (!in_sorted_restriction(p, m)) {
            throw std::domain_error("compose: outer member outside S_{n,m}: " + p.to_string());
        }
    }
    PermArray out(outer.n(), "compose(" + outer.provenance() + " x " + inner.provenance() + ")");
    for (const auto& p : outer) {
        for (const auto& t : inner) out.add(substitute(p, m, t));
    }
    return detail::certified(std::move(out), d);
}

/// Union construction: for each outer member tau, an (n,d)-array whose m
/// largest symbols sit exactly where tau has them. Size is the sum.
inline PermArray compose_sum(const PermArray& outer, const std::vector<std::pair<Permutation, PermArray>>& inners) {
    const auto d = detail::require_claimed_d(outer, "compose_sum");
    if (!outer.restriction_m()) {
        throw std::domain_error("compose_sum needs an outer array with a restriction m");
    }
    const auto m = *outer.restriction_m();
    PermArray out(outer.n(), "compose_sum(" + outer.provenance() + ")");
    for (const auto& [tau, inner] : inners) {
        if (!outer.contains(tau)) {
            throw std::domain_error("compose_sum: " + tau.to_string() + " is not a member of the outer array");
        }
        if (inner.n() != outer.n()) {
            throw std::domain_error("compose_sum: inner array has the wrong symbol count");
        }
        const auto pinned = SearchSpace::pinned_like(tau, m);
        for (const auto& p : inner) {
            if (!pinned.contains(p)) {
                throw std::domain_error("compose_sum: " + p.to_string() + " does not share the placement of " +
                                        tau.to_string());
            }
            out.add(p);
        }
    }
    return detail::certified(std::move(out), d);
}

/// {identity, (n-1, ..., n-m, 0, ..., n-m-1)}: the largest-distance pair in
/// S_{n,m}, at distance mn - m(m+1)/2.
inline PermArray two_point_array(std::size_t n, std::size_t m) {
    if (m < 1 || m >= n) {
        throw std::domain_error("two_point_array needs 1 <= m < n");
    }
    std::vector<Symbol> s;
    for (std::size_t i = 0; i < m; ++i) s.push_back(static_cast<Symbol>(n - 1 - i));
    for (std::size_t i = 0; i < n - m; ++i) s.push_back(static_cast<Symbol>(i));
    PermArray out(n, "two_point_array(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")");
    out.add(Permutation::identity(n));
    out.add(Permutation(std::move(s)));
    out.set_restriction_m(m);
    return detail::certified(std::move(out), m * n - m * (m + 1) / 2);
}

/// Three members of S_{n,2} at distance n + floor(n/3) - 2, with x = floor(n/3)
/// (1-based symbols):
///   (n-1, n, 1, ..., n-2)
///   (1, ..., x-1, n, x, ..., n-2, n-1)
///   (1, ..., x, n-1, x+1, ..., n-2, n)
inline PermArray three_array(std::size_t n) {
    if (n < 5) {
        throw std::domain_error("three_array needs n >= 5");
    }
    const auto x = n / 3;
    const auto hi = static_cast<Symbol>(n - 1);
    const auto lo = static_cast<Symbol>(n - 2);
    PermArray out(n, "three_array(n=" + std::to_string(n) + ")");
    out.add(PatternString{n, {{0, lo}, {1, hi}}}.expand());
    out.add(PatternString{n, {{x - 1, hi}, {n - 1, lo}}}.expand());
    out.add(PatternString{n, {{x, lo}, {n - 1, hi}}}.expand());
    out.set_restriction_m(2);
    return detail::certified(std::move(out), n + x - 2);
}

/// Five members of S_{n,2} at distance n - 2. With k = floor(n/2) and 1-based
/// positions, (n-1, n) sit at (1,2), (n-1,n), (k,k+1), (1,n) and (n,1); for
/// odd n the middle member holds n at k and n-1 at k+1.
inline PermArray five_array(std::size_t n) {
    if (n < 6) {
        throw std::domain_error("five_array needs n >= 6");
    }
    const auto k = n / 2;
    const auto hi = static_cast<Symbol>(n - 1);
    const auto lo = static_cast<Symbol>(n - 2);
    PermArray out(n, "five_array(n=" + std::to_string(n) + ")");
    out.add(PatternString{n, {{0, lo}, {1, hi}}}.expand());
    out.add(PatternString{n, {{n - 2, lo}, {n - 1, hi}}}.expand());
    if (n % 2 == 0) {
        out.add(PatternString{n, {{k - 1, lo}, {k, hi}}}.expand());
    } else {
        out.add(PatternString{n, {{k - 1, hi}, {k, lo}}}.expand());
    }
    out.add(PatternString{n, {{0, lo}, {n - 1, hi}}}.expand());
    out.add(PatternString{n, {{0, hi}, {n - 1, lo}}}.expand());
    out.set_restriction_m(2);
    return detail::certified(std::move(out), n - 2);
}

/// (n,2,3)-array from the gap patterns pi1(a,b,c) = ..a.., n-1, ..b.., n, ..c..
/// and pi2(a,b,c) = ..a.., n, ..b.., n-1, ..c..: pi1 for even a, pi2 for odd a,
/// b a multiple of 3, c = n-2-a-b >= 0.
inline PermArray pattern_d3(std::size_t n) {
    if (n < 4) {
        throw std::domain_error("pattern_d3 needs n >= 4");
    }
    const auto hi = static_cast<Symbol>(n - 1);
    const auto lo = static_cast<Symbol>(n - 2);
    PermArray out(n, "pattern_d3(n=" + std::to_string(n) + ")");
    for (std::size_t a = 0; a <= n - 2; ++a) {
        for (std::size_t b = 0; a + b <= n - 2; b += 3) {
            out.add(a % 2 == 0 ? two_symbol_pattern(n, a, lo, b, hi) : two_symbol_pattern(n, a, hi, b, lo));
        }
    }
    out.set_restriction_m(2);
    return detail::certified(std::move(out), 3);
}

/// (n,2,4)-array for odd n: pi1 with even a and b in {0,4,8,...}, pi2 with
/// even a and b in {3,7,11,...}.
inline PermArray pattern_d4(std::size_t n) {
    if (n < 4) {
        throw std::domain_error("pattern_d4 needs n >= 4");
    }
    if (n % 2 == 0) {
        throw std::domain_error("pattern_d4 needs odd n, got " + std::to_string(n));
    }
    const auto hi = static_cast<Symbol>(n - 1);
    const auto lo = static_cast<Symbol>(n - 2);
    PermArray out(n, "pattern_d4(n=" + std::to_string(n) + ")");
    for (std::size_t a = 0; a <= n - 2; a += 2) {
        for (std::size_t b = 0; a + b <= n - 2; b += 4) out.add(two_symbol_pattern(n, a, lo, b, hi));
        for (std::size_t b = 3; a + b <= n - 2; b += 4) out.add(two_symbol_pattern(n, a, hi, b, lo));
    }
    out.set_restriction_m(2);
    return detail::certified(std::move(out), 4);
}

}  // namespace kpa
