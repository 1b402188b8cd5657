#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kpa/permutation.hpp"

namespace kpa {

/// True iff the n-m smallest symbols appear in increasing order of position,
/// i.e. p is a member of S_{n,m}.
inline bool in_sorted_restriction(const Permutation& p, std::size_t m) {
    const auto n = p.size();
    if (m >= n) {
        return true;
    }
    const auto small = static_cast<Symbol>(n - m);
    Symbol expected = 0;
    for (Symbol s : p.symbols()) {
        if (s < small) {
            if (s != expected) {
                return false;
            }
            ++expected;
        }
    }
    return true;
}

/// A deduplicated set of permutations on n symbols. Insertion order is kept;
/// re-inserting a member is counted, not stored.
class PermArray {
public:
    PermArray() = default;
    explicit PermArray(std::size_t n, std::string provenance = {})
        : n_(n), provenance_(std::move(provenance)) {
        if (n == 0 || n > kMaxSymbols) {
            throw std::domain_error("array symbol count must be in [1, 64]");
        }
    }

    template <class Range>
    static PermArray of(std::size_t n, const Range& members, std::string provenance = {}) {
        PermArray a(n, std::move(provenance));
        for (const auto& p : members) {
            a.add(p);
        }
        return a;
    }

    /// Adds p unless already present. Returns whether it was new.
    bool add(const Permutation& p) {
        if (p.size() != n_) {
            throw std::domain_error("array member has " + std::to_string(p.size()) + " symbols, expected " +
                                    std::to_string(n_));
        }
        if (!index_.insert(p).second) {
            ++duplicates_;
            return false;
        }
        members_.push_back(p);
        return true;
    }

    bool contains(const Permutation& p) const { return index_.contains(p); }

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const std::vector<Permutation>& members() const noexcept { return members_; }
    const Permutation& operator[](std::size_t i) const { return members_[i]; }
    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }

    /// Number of rejected duplicate insertions.
    std::size_t duplicates() const noexcept { return duplicates_; }

    std::optional<std::size_t> claimed_d() const noexcept { return claimed_d_; }
    void set_claimed_d(std::optional<std::size_t> d) { claimed_d_ = d; }

    std::optional<std::size_t> restriction_m() const noexcept { return restriction_m_; }
    void set_restriction_m(std::optional<std::size_t> m) { restriction_m_ = m; }

    const std::string& provenance() const noexcept { return provenance_; }
    void set_provenance(std::string tag) { provenance_ = std::move(tag); }

    void sort_lex() { std::sort(members_.begin(), members_.end()); }

private:
    std::size_t n_ = 0;
    std::vector<Permutation> members_;
    std::unordered_set<Permutation, PermutationHash> index_;
    std::size_t duplicates_ = 0;
    std::optional<std::size_t> claimed_d_;
    std::optional<std::size_t> restriction_m_;
    std::string provenance_;
};

}  // namespace kpa
