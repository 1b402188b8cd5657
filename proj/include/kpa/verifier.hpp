#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kpa/parallel.hpp"
#include "kpa/perm_array.hpp"
#include "kpa/permutation.hpp"

namespace kpa {

struct CertReport {
    std::size_t size = 0;
    /// Exact minimum pairwise distance; n(n-1)/2 + 1 when there are no pairs.
    std::uint32_t min_distance = 0;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    bool restriction_ok = true;
    std::size_t duplicates = 0;
    /// Set by certify(); min_pairwise_distance() leaves it true.
    bool passed = true;
    std::optional<std::size_t> required_d;
    std::chrono::duration<double> elapsed{};
    /// Index of the first member outside S_{n,m}, if any.
    std::optional<std::size_t> restriction_violation;
};

struct VerifyOptions {
    /// Above this many members the caller must opt in explicitly.
    std::size_t size_guard = 100'000;
    bool allow_large = false;
    std::size_t workers = 0;  // 0 = worker_count()
};

namespace detail {

struct PairMin {
    std::uint32_t distance = std::numeric_limits<std::uint32_t>::max();
    std::size_t i = 0;
    std::size_t j = 0;

    void offer(std::uint32_t d, std::size_t a, std::size_t b) {
        if (d < distance || (d == distance && std::pair{a, b} < std::pair{i, j})) {
            distance = d;
            i = a;
            j = b;
        }
    }
};

}  // namespace detail

/// Exact min over all unordered pairs with a witness. The witness is the
/// lexicographically smallest index pair attaining the minimum, so the report
/// does not depend on the parallel schedule.
inline CertReport min_pairwise_distance(const PermArray& a, const VerifyOptions& options = {}) {
    const auto start = std::chrono::steady_clock::now();
    if (a.empty()) {
        throw std::domain_error("cannot verify an empty array");
    }
    if (a.size() > options.size_guard && !options.allow_large) {
        throw std::domain_error("array has " + std::to_string(a.size()) + " members, above the " +
                                std::to_string(options.size_guard) +
                                " verification guard; pass an explicit override to proceed");
    }
    const auto n = a.n();
    const auto count = a.size();

    std::vector<Symbol> positions(count * n);
    for (std::size_t k = 0; k < count; ++k) {
        const auto pos = a[k].positions();
        std::copy(pos.begin(), pos.end(), positions.begin() + static_cast<std::ptrdiff_t>(k * n));
    }

    const auto workers = options.workers == 0 ? worker_count() : options.workers;
    std::vector<detail::PairMin> partial(std::max<std::size_t>(workers, 1));
    parallel_for(
        count,
        [&](std::size_t w, std::size_t i) {
            const std::span<const Symbol> row(positions.data() + i * n, n);
            auto& best = partial[w];
            for (std::size_t j = i + 1; j < count; ++j) {
                best.offer(detail::kendall_from_positions(row, a[j].symbols()), i, j);
            }
        },
        workers);

    detail::PairMin best;
    for (const auto& p : partial) {
        if (p.distance != std::numeric_limits<std::uint32_t>::max()) {
            best.offer(p.distance, p.i, p.j);
        }
    }

    CertReport report;
    report.size = count;
    report.duplicates = a.duplicates();
    if (count >= 2) {
        report.min_distance = best.distance;
        report.witness = std::pair{best.i, best.j};
    } else {
        report.min_distance = max_kendall_distance(n) + 1;
    }
    if (const auto m = a.restriction_m()) {
        for (std::size_t k = 0; k < count; ++k) {
            if (!in_sorted_restriction(a[k], *m)) {
                report.restriction_ok = false;
                report.restriction_violation = k;
                break;
            }
        }
    }
    report.elapsed = std::chrono::steady_clock::now() - start;
    return report;
}

/// Passes iff every pair is at distance >= d and, when the array carries a
/// restriction m, every member lies in S_{n,m}.
inline CertReport certify(const PermArray& a, std::size_t d, const VerifyOptions& options = {}) {
    if (d < 1) {
        throw std::domain_error("certification distance must be >= 1");
    }
    auto report = min_pairwise_distance(a, options);
    report.required_d = d;
    report.passed = report.min_distance >= d && report.restriction_ok;
    return report;
}

inline std::ostream& operator<<(std::ostream& os, const CertReport& r) {
    os << "size=" << r.size;
    if (r.witness) {
        os << " min_distance=" << r.min_distance << " witness=(" << r.witness->first << ","
           << r.witness->second << ")";
    } else {
        os << " min_distance=inf";
    }
    os << " restriction_ok=" << (r.restriction_ok ? "true" : "false");
    if (r.restriction_violation) {
        os << " restriction_violation=" << *r.restriction_violation;
    }
    if (r.duplicates != 0) {
        os << " duplicates_dropped=" << r.duplicates;
    }
    if (r.required_d) {
        os << " d=" << *r.required_d << " result=" << (r.passed ? "PASS" : "FAIL");
    }
    os << " elapsed=" << r.elapsed.count() << "s";
    return os;
}

}  // namespace kpa
