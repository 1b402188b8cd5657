#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kpa/parallel.hpp"
#include "kpa/perm_array.hpp"
#include "kpa/permutation.hpp"
#include "kpa/rng.hpp"
#include "kpa/verifier.hpp"

namespace kpa {

/// A position pinned to one of the m largest symbols.
struct Pin {
    std::size_t position = 0;
    Symbol symbol = 0;
    friend bool operator==(const Pin&, const Pin&) = default;
};

/// The set of permutations a search ranges over.
///
///  - full: all n! permutations.
///  - restricted_sorted(m): S_{n,m}, the n!/(n-m)! permutations whose n-m
///    smallest symbols are in increasing order.
///  - fixed_positions(pins): the (n-m)! permutations with the m largest
///    symbols pinned to given positions.
class SearchSpace {
public:
    enum class Kind { full, restricted_sorted, fixed_positions };

    static SearchSpace full(std::size_t n) {
        SearchSpace s(Kind::full, n);
        s.m_ = n;
        return s;
    }

    static SearchSpace restricted_sorted(std::size_t n, std::size_t m) {
        if (m >= n) {
            throw std::domain_error("restricted space needs m < n");
        }
        SearchSpace s(Kind::restricted_sorted, n);
        s.m_ = m;
        return s;
    }

    static SearchSpace fixed_positions(std::size_t n, std::vector<Pin> pins) {
        SearchSpace s(Kind::fixed_positions, n);
        const auto m = pins.size();
        if (m == 0 || m >= n) {
            throw std::domain_error("fixed-position space needs 1 <= m < n pins");
        }
        std::vector<bool> pos_used(n, false);
        std::vector<bool> sym_used(n, false);
        for (const auto& pin : pins) {
            if (pin.position >= n || pin.symbol < n - m || pin.symbol >= n) {
                throw std::domain_error("pins must place the m largest symbols inside the permutation");
            }
            if (pos_used[pin.position] || sym_used[pin.symbol]) {
                throw std::domain_error("pin assignment must be injective");
            }
            pos_used[pin.position] = true;
            sym_used[pin.symbol] = true;
        }
        std::sort(pins.begin(), pins.end(), [](const Pin& a, const Pin& b) { return a.position < b.position; });
        s.m_ = m;
        s.pins_ = std::move(pins);
        return s;
    }

    /// Pins the m largest symbols where `tau` has them.
    static SearchSpace pinned_like(const Permutation& tau, std::size_t m) {
        std::vector<Pin> pins;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            if (tau[i] >= tau.size() - m) pins.push_back({i, tau[i]});
        }
        return fixed_positions(tau.size(), std::move(pins));
    }

    Kind kind() const noexcept { return kind_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    const std::vector<Pin>& pins() const noexcept { return pins_; }

    /// Number of members, saturating at UINT64_MAX.
    std::uint64_t size() const {
        std::uint64_t count = 1;
        const auto mul = [&count](std::uint64_t f) {
            if (count > std::numeric_limits<std::uint64_t>::max() / f) {
                count = std::numeric_limits<std::uint64_t>::max();
            } else {
                count *= f;
            }
        };
        switch (kind_) {
            case Kind::full:
                for (std::uint64_t k = 2; k <= n_; ++k) mul(k);
                break;
            case Kind::restricted_sorted:
                for (std::uint64_t k = n_ - m_ + 1; k <= n_; ++k) mul(k);
                break;
            case Kind::fixed_positions:
                for (std::uint64_t k = 2; k <= n_ - m_; ++k) mul(k);
                break;
        }
        return count;
    }

    bool contains(const Permutation& p) const {
        if (p.size() != n_) return false;
        switch (kind_) {
            case Kind::full: return true;
            case Kind::restricted_sorted: return in_sorted_restriction(p, m_);
            case Kind::fixed_positions:
                return std::all_of(pins_.begin(), pins_.end(),
                                   [&](const Pin& pin) { return p[pin.position] == pin.symbol; });
        }
        return false;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::full: return "full(n=" + std::to_string(n_) + ")";
            case Kind::restricted_sorted:
                return "s-nm(n=" + std::to_string(n_) + ",m=" + std::to_string(m_) + ")";
            case Kind::fixed_positions: {
                std::string s = "fixed(n=" + std::to_string(n_) + ";";
                for (std::size_t i = 0; i < pins_.size(); ++i) {
                    s += (i ? "," : "") + std::to_string(pins_[i].symbol + 1) + "@" +
                         std::to_string(pins_[i].position + 1);
                }
                return s + ")";
            }
        }
        return {};
    }

    /// Visits members in the space's canonical order until visit returns false.
    ///  - full: lexicographic.
    ///  - restricted_sorted: position sets in lexicographic order, then the
    ///    arrangements of the m largest symbols over those positions in
    ///    lexicographic order.
    ///  - fixed_positions: small-symbol arrangements in lexicographic order.
    template <class Visit>
    void for_each(Visit&& visit) const {
        switch (kind_) {
            case Kind::full: {
                std::vector<Symbol> s(n_);
                std::iota(s.begin(), s.end(), Symbol{0});
                do {
                    if (!visit(Permutation(s))) return;
                } while (std::next_permutation(s.begin(), s.end()));
                return;
            }
            case Kind::restricted_sorted: {
                std::vector<bool> chosen(n_, false);
                std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(m_), true);
                // prev_permutation over a true-first mask enumerates position sets lexicographically.
                do {
                    std::vector<std::size_t> positions;
                    for (std::size_t i = 0; i < n_; ++i) {
                        if (chosen[i]) positions.push_back(i);
                    }
                    std::vector<Symbol> large(m_);
                    std::iota(large.begin(), large.end(), static_cast<Symbol>(n_ - m_));
                    do {
                        if (!visit(assemble(positions, large))) return;
                    } while (std::next_permutation(large.begin(), large.end()));
                } while (std::prev_permutation(chosen.begin(), chosen.end()));
                return;
            }
            case Kind::fixed_positions: {
                std::vector<Symbol> small(n_ - m_);
                std::iota(small.begin(), small.end(), Symbol{0});
                do {
                    if (!visit(fill_pinned(small))) return;
                } while (std::next_permutation(small.begin(), small.end()));
                return;
            }
        }
    }

    /// Visits members in lexicographic order of their position tables (the
    /// position of symbol 1, then of symbol 2, ...), i.e. lexicographic order
    /// of the inverses. This is the sweep order of the greedy search.
    template <class Visit>
    void for_each_by_positions(Visit&& visit) const {
        std::vector<std::size_t> pinned_at(n_, n_);  // symbol -> pinned position
        std::vector<bool> pinned_slot(n_, false);
        for (const auto& pin : pins_) {
            pinned_at[pin.symbol] = pin.position;
            pinned_slot[pin.position] = true;
        }
        const auto sorted_prefix = kind_ == Kind::restricted_sorted ? n_ - m_ : 0;
        std::vector<std::size_t> pos(n_);
        std::vector<bool> used(n_, false);
        std::vector<Symbol> symbols(n_);
        bool stop = false;
        const auto place = [&](auto& self, std::size_t s) -> void {
            if (s == n_) {
                for (std::size_t k = 0; k < n_; ++k) symbols[pos[k]] = static_cast<Symbol>(k);
                stop = !visit(Permutation(symbols));
                return;
            }
            std::size_t lo = 0;
            if (s > 0 && s < sorted_prefix) lo = pos[s - 1] + 1;
            for (std::size_t at = lo; at < n_ && !stop; ++at) {
                if (used[at]) continue;
                if (pinned_at[s] != n_ ? at != pinned_at[s] : pinned_slot[at]) continue;
                used[at] = true;
                pos[s] = at;
                self(self, s + 1);
                used[at] = false;
            }
        };
        place(place, 0);
    }

    /// Uniformly random member.
    Permutation random_member(Rng& rng) const {
        switch (kind_) {
            case Kind::full: {
                std::vector<Symbol> s(n_);
                std::iota(s.begin(), s.end(), Symbol{0});
                rng.shuffle(s.begin(), s.end());
                return Permutation(std::move(s));
            }
            case Kind::restricted_sorted: {
                // A member is an injective placement of the m large symbols.
                std::vector<std::size_t> slots(n_);
                std::iota(slots.begin(), slots.end(), std::size_t{0});
                for (std::size_t i = 0; i < m_; ++i) {
                    const auto j = i + rng.below(n_ - i);
                    std::swap(slots[i], slots[j]);
                }
                std::vector<Symbol> s(n_, 0);
                std::vector<bool> taken(n_, false);
                for (std::size_t i = 0; i < m_; ++i) {
                    s[slots[i]] = static_cast<Symbol>(n_ - m_ + i);
                    taken[slots[i]] = true;
                }
                Symbol next = 0;
                for (std::size_t i = 0; i < n_; ++i) {
                    if (!taken[i]) s[i] = next++;
                }
                return Permutation(std::move(s));
            }
            case Kind::fixed_positions: {
                std::vector<Symbol> small(n_ - m_);
                std::iota(small.begin(), small.end(), Symbol{0});
                rng.shuffle(small.begin(), small.end());
                return fill_pinned(small);
            }
        }
        throw std::logic_error("unreachable");
    }

private:
    SearchSpace(Kind kind, std::size_t n) : kind_(kind), n_(n) {
        if (n < 1 || n > kMaxSymbols) {
            throw std::domain_error("search space n must be in [1, 64]");
        }
    }

    Permutation assemble(const std::vector<std::size_t>& positions, const std::vector<Symbol>& large) const {
        std::vector<Symbol> s(n_);
        std::vector<bool> taken(n_, false);
        for (std::size_t i = 0; i < positions.size(); ++i) {
            s[positions[i]] = large[i];
            taken[positions[i]] = true;
        }
        Symbol next = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!taken[i]) s[i] = next++;
        }
        return Permutation(std::move(s));
    }

    Permutation fill_pinned(const std::vector<Symbol>& small) const {
        std::vector<Symbol> s(n_);
        std::vector<bool> taken(n_, false);
        for (const auto& pin : pins_) {
            s[pin.position] = pin.symbol;
            taken[pin.position] = true;
        }
        std::size_t k = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!taken[i]) s[i] = small[k++];
        }
        return Permutation(std::move(s));
    }

    Kind kind_;
    std::size_t n_;
    std::size_t m_ = 0;
    std::vector<Pin> pins_;
};

struct GreedyOptions {
    /// Random phase gives up after this many rejected draws per requested seed.
    std::size_t draw_budget_factor = 50;
    /// Spaces larger than this are refused.
    std::uint64_t size_guard = 1'000'000'000;
};

namespace detail {

/// Kept members stored as position tables, so each distance test is a
/// relabel plus a merge count.
class KeptSet {
public:
    explicit KeptSet(std::size_t n) : n_(n) {}

    bool far_from_all(const Permutation& p, std::size_t d) const {
        const auto count = positions_.size() / n_;
        for (std::size_t k = 0; k < count; ++k) {
            const std::span<const Symbol> row(positions_.data() + k * n_, n_);
            if (kendall_from_positions(row, p.symbols()) < d) return false;
        }
        return true;
    }

    void add(const Permutation& p) {
        const auto pos = p.positions();
        positions_.insert(positions_.end(), pos.begin(), pos.end());
        members_.push_back(p);
    }

    const std::vector<Permutation>& members() const noexcept { return members_; }

private:
    std::size_t n_;
    std::vector<Symbol> positions_;
    std::vector<Permutation> members_;
};

inline void check_space_size(const SearchSpace& space, const GreedyOptions& options) {
    if (space.size() > options.size_guard) {
        throw std::domain_error("search space " + space.describe() + " has more than " +
                                std::to_string(options.size_guard) +
                                " members; use a restricted (s-nm) or fixed-position space instead");
    }
}

inline PermArray finish(const SearchSpace& space, std::size_t d, const std::vector<Permutation>& members,
                        std::string provenance) {
    PermArray out(space.n(), std::move(provenance));
    for (const auto& p : members) out.add(p);
    out.set_claimed_d(d);
    if (space.kind() == SearchSpace::Kind::restricted_sorted) {
        out.set_restriction_m(space.m());
    }
    return out;
}

inline std::vector<Permutation> greedy_members(const SearchSpace& space, std::size_t d, std::size_t seed_count,
                                               std::uint64_t rng_seed, const GreedyOptions& options) {
    KeptSet kept(space.n());
    Rng rng(rng_seed);
    std::size_t failures = 0;
    const std::size_t budget = options.draw_budget_factor * seed_count;
    while (kept.members().size() < seed_count && failures < budget) {
        auto p = space.random_member(rng);
        if (kept.far_from_all(p, d)) {
            kept.add(p);
        } else {
            ++failures;
        }
    }
    space.for_each_by_positions([&](const Permutation& p) {
        if (kept.far_from_all(p, d)) kept.add(p);
        return true;
    });
    return kept.members();
}

}  // namespace detail

/// Random phase followed by a greedy sweep: draw uniform members, keeping
/// those at distance >= d from everything kept, until seed_count are kept or
/// the draw budget is spent; then sweep the space in position-table order adding
/// every member at distance >= d from all kept. The result is certified
/// before it is returned.
inline PermArray random_greedy(const SearchSpace& space, std::size_t d, std::size_t seed_count,
                               std::uint64_t rng_seed, const GreedyOptions& options = {}) {
    if (d < 1) {
        throw std::domain_error("search distance must be >= 1");
    }
    detail::check_space_size(space, options);
    const auto members = detail::greedy_members(space, d, seed_count, rng_seed, options);
    auto out = detail::finish(space, d, members,
                              "random_greedy space=" + space.describe() + " d=" + std::to_string(d) +
                                  " seeds=" + std::to_string(seed_count) + " rng=" + std::string(Rng::kName) +
                                  " seed=" + std::to_string(rng_seed));
    if (out.size() >= 2 && !certify(out, d).passed) {
        throw std::logic_error("random_greedy produced an array that fails certification");
    }
    return out;
}

/// Seed counts used by best_of_restarts when no schedule is given: restart r
/// uses entry r modulo the length.
inline const std::vector<std::size_t>& default_seed_schedule() {
    static const std::vector<std::size_t> schedule{0, 1, 1, 2, 1, 1, 3, 1};
    return schedule;
}

struct RestartOptions {
    std::vector<std::size_t> seed_schedule = default_seed_schedule();
    GreedyOptions greedy{};
    std::size_t workers = 0;  // 0 = worker_count()
};

/// Runs random_greedy for each restart r with rng stream derive_seed(rng_seed, r)
/// and seed count schedule[r % len]. Returns the largest array, the earliest
/// restart winning ties, so the output is deterministic in rng_seed.
inline PermArray best_of_restarts(const SearchSpace& space, std::size_t d, std::size_t restarts,
                                  std::uint64_t rng_seed, const RestartOptions& options = {}) {
    if (d < 1) {
        throw std::domain_error("search distance must be >= 1");
    }
    if (restarts == 0) {
        throw std::domain_error("best_of_restarts needs at least one restart");
    }
    if (options.seed_schedule.empty()) {
        throw std::domain_error("seed schedule must not be empty");
    }
    detail::check_space_size(space, options.greedy);
    std::vector<std::vector<Permutation>> results(restarts);
    parallel_for(
        restarts,
        [&](std::size_t, std::size_t r) {
            const auto seeds = options.seed_schedule[r % options.seed_schedule.size()];
            results[r] = detail::greedy_members(space, d, seeds, derive_seed(rng_seed, r), options.greedy);
        },
        options.workers == 0 ? worker_count() : options.workers);

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (results[r].size() > results[best].size()) best = r;
    }
    auto out = detail::finish(space, d, results[best],
                              "best_of_restarts space=" + space.describe() + " d=" + std::to_string(d) +
                                  " restarts=" + std::to_string(restarts) + " best_restart=" +
                                  std::to_string(best) + " seeds=" +
                                  std::to_string(options.seed_schedule[best % options.seed_schedule.size()]) +
                                  " rng=" + std::string(Rng::kName) + " seed=" + std::to_string(rng_seed));
    if (out.size() >= 2 && !certify(out, d).passed) {
        throw std::logic_error("best_of_restarts produced an array that fails certification");
    }
    return out;
}

/// Random-greedy search for an (n,m,d)-array over S_{n,m}; `budget` is the
/// number of restarts.
inline PermArray pnmd_search(std::size_t n, std::size_t m, std::size_t d, std::size_t budget,
                             std::uint64_t rng_seed, const RestartOptions& options = {}) {
    return best_of_restarts(SearchSpace::restricted_sorted(n, m), d, budget, rng_seed, options);
}

}  // namespace kpa
