#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpa/perm_array.hpp"
#include "kpa/search.hpp"
#include "kpa/verifier.hpp"

namespace kpa {

/// Dense undirected graph on bitset rows.
class BitGraph {
public:
    explicit BitGraph(std::size_t vertices)
        : n_(vertices), words_((vertices + 63) / 64), rows_(vertices * words_, 0) {}

    std::size_t size() const noexcept { return n_; }
    std::size_t words() const noexcept { return words_; }

    void connect(std::size_t a, std::size_t b) {
        rows_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
        rows_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
    }

    bool adjacent(std::size_t a, std::size_t b) const {
        return (rows_[a * words_ + b / 64] >> (b % 64)) & 1U;
    }

    const std::uint64_t* row(std::size_t v) const { return rows_.data() + v * words_; }

    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(row(v)[w]));
        return d;
    }

private:
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> rows_;
};

/// Vertices ordered by decreasing core number: repeatedly strip a minimum
/// degree vertex, then reverse the removal order.
inline std::vector<std::size_t> degeneracy_order(const BitGraph& g) {
    const auto n = g.size();
    std::vector<std::size_t> degree(n);
    for (std::size_t v = 0; v < n; ++v) degree[v] = g.degree(v);
    std::vector<bool> removed(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!removed[v] && (pick == n || degree[v] < degree[pick])) pick = v;
        }
        removed[pick] = true;
        order.push_back(pick);
        for (std::size_t v = 0; v < n; ++v) {
            if (!removed[v] && g.adjacent(pick, v)) --degree[v];
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

/// Exact maximum clique: branch and bound with a greedy colouring bound
/// (Tomita-style), vertices pre-sorted by degeneracy order.
class MaxCliqueSolver {
public:
    explicit MaxCliqueSolver(const BitGraph& g) : g_(g) {}

    std::vector<std::size_t> solve() {
        const auto n = g_.size();
        order_ = degeneracy_order(g_);
        // Work in relabelled space so bit index = position in order_.
        relabelled_ = BitGraph(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (g_.adjacent(order_[i], order_[j])) relabelled_.connect(i, j);
            }
        }
        std::vector<std::uint64_t> candidates(relabelled_.words(), 0);
        for (std::size_t v = 0; v < n; ++v) candidates[v / 64] |= std::uint64_t{1} << (v % 64);
        best_.clear();
        current_.clear();
        if (n > 0) expand(candidates);
        std::vector<std::size_t> out;
        for (auto v : best_) out.push_back(order_[v]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    void colour(const std::vector<std::uint64_t>& p, std::vector<std::size_t>& verts,
                std::vector<std::size_t>& bounds) const {
        const auto words = relabelled_.words();
        std::vector<std::uint64_t> uncoloured = p;
        verts.clear();
        bounds.clear();
        std::size_t colour_index = 0;
        auto any = [&](const std::vector<std::uint64_t>& s) {
            return std::any_of(s.begin(), s.end(), [](std::uint64_t w) { return w != 0; });
        };
        while (any(uncoloured)) {
            ++colour_index;
            std::vector<std::uint64_t> q = uncoloured;
            while (any(q)) {
                std::size_t w = 0;
                while (q[w] == 0) ++w;
                const auto v = w * 64 + static_cast<std::size_t>(std::countr_zero(q[w]));
                q[w] &= q[w] - 1;
                uncoloured[v / 64] &= ~(std::uint64_t{1} << (v % 64));
                const auto* nb = relabelled_.row(v);
                for (std::size_t k = 0; k < words; ++k) q[k] &= ~nb[k];
                verts.push_back(v);
                bounds.push_back(colour_index);
            }
        }
    }

    void expand(std::vector<std::uint64_t> p) {
        std::vector<std::size_t> verts;
        std::vector<std::size_t> bounds;
        colour(p, verts, bounds);
        const auto words = relabelled_.words();
        for (std::size_t k = verts.size(); k-- > 0;) {
            if (current_.size() + bounds[k] <= best_.size()) return;
            const auto v = verts[k];
            current_.push_back(v);
            std::vector<std::uint64_t> next(words);
            const auto* nb = relabelled_.row(v);
            bool empty = true;
            for (std::size_t w = 0; w < words; ++w) {
                next[w] = p[w] & nb[w];
                empty = empty && next[w] == 0;
            }
            if (empty) {
                if (current_.size() > best_.size()) best_ = current_;
            } else {
                expand(std::move(next));
            }
            current_.pop_back();
            p[v / 64] &= ~(std::uint64_t{1} << (v % 64));
        }
    }

    const BitGraph& g_;
    BitGraph relabelled_{0};
    std::vector<std::size_t> order_;
    std::vector<std::size_t> best_;
    std::vector<std::size_t> current_;
};

struct CliqueOptions {
    std::uint64_t size_guard = 5040;
};

/// Maximum (n,d)-array inside `space`: one vertex per member, an edge when the
/// distance is at least d, solved exactly. The clique size is the optimum over
/// that space.
inline PermArray clique_exact(const SearchSpace& space, std::size_t d, const CliqueOptions& options = {}) {
    if (d < 1) {
        throw std::domain_error("clique distance must be >= 1");
    }
    if (space.size() > options.size_guard) {
        throw std::domain_error("space " + space.describe() + " has " + std::to_string(space.size()) +
                                " members, above the clique guard of " + std::to_string(options.size_guard));
    }
    std::vector<Permutation> members;
    space.for_each([&](const Permutation& p) {
        members.push_back(p);
        return true;
    });
    const auto count = members.size();
    std::vector<std::vector<Symbol>> positions(count);
    for (std::size_t i = 0; i < count; ++i) positions[i] = members[i].positions();
    BitGraph g(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            if (detail::kendall_from_positions(positions[i], members[j].symbols()) >= d) g.connect(i, j);
        }
    }
    MaxCliqueSolver solver(g);
    const auto clique = solver.solve();

    PermArray out(space.n(), "clique_exact space=" + space.describe() + " d=" + std::to_string(d));
    for (auto v : clique) out.add(members[v]);
    out.set_claimed_d(d);
    if (space.kind() == SearchSpace::Kind::restricted_sorted) out.set_restriction_m(space.m());
    if (out.size() >= 2 && !certify(out, d).passed) {
        throw std::logic_error("clique_exact produced an array that fails certification");
    }
    return out;
}

}  // namespace kpa
