#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpa/parallel.hpp"
#include "kpa/perm_array.hpp"
#include "kpa/permutation.hpp"
#include "kpa/rng.hpp"
#include "kpa/verifier.hpp"

namespace kpa {

/// Arithmetic on the symbol set {0, ..., n-1}: either the ring Z_n or the
/// field GF(p^k). A field element with coefficient vector (c_{k-1}, ..., c_0)
/// is the symbol sum c_i p^i.
class SymbolDomain {
public:
    enum class Kind { ring_mod_n, field_gf };

    /// Z_n. Multiplication is refused unless allow_mul is set.
    static SymbolDomain ring(std::size_t n, bool allow_mul = false) {
        if (n < 1 || n > kMaxSymbols) {
            throw std::domain_error("ring size must be in [1, 64]");
        }
        SymbolDomain d;
        d.kind_ = Kind::ring_mod_n;
        d.n_ = n;
        d.p_ = n;
        d.k_ = 1;
        d.mul_allowed_ = allow_mul;
        d.build_tables([n](std::size_t x, std::size_t y) { return (x + y) % n; },
                       [n](std::size_t x, std::size_t y) { return (x * y) % n; });
        return d;
    }

    /// GF(p^k) modulo the monic polynomial with coefficients `poly`, highest
    /// degree first (x^3 + x^2 + 1 is {1, 1, 0, 1}). Throws unless p is prime
    /// and the polynomial is irreducible of degree k.
    static SymbolDomain field(std::size_t p, std::size_t k, std::vector<int> poly) {
        if (!is_prime(p) || k < 1) {
            throw std::domain_error("field characteristic must be prime and degree >= 1");
        }
        std::size_t q = 1;
        for (std::size_t i = 0; i < k; ++i) q *= p;
        if (q > kMaxSymbols) {
            throw std::domain_error("field order exceeds 64 symbols");
        }
        if (poly.size() != k + 1 || poly.front() != 1) {
            throw std::domain_error("field polynomial must be monic of degree " + std::to_string(k));
        }
        for (int c : poly) {
            if (c < 0 || static_cast<std::size_t>(c) >= p) {
                throw std::domain_error("field polynomial coefficient out of range");
            }
        }
        if (!is_irreducible(p, poly)) {
            throw std::domain_error("polynomial is reducible over Z_" + std::to_string(p));
        }
        SymbolDomain d;
        d.kind_ = Kind::field_gf;
        d.n_ = q;
        d.p_ = p;
        d.k_ = k;
        d.poly_ = poly;
        d.mul_allowed_ = true;
        d.build_tables([&](std::size_t x, std::size_t y) { return d.poly_add(x, y); },
                       [&](std::size_t x, std::size_t y) { return d.poly_mul(x, y); });
        return d;
    }

    /// The field of order q with this library's default modulus: for prime q
    /// it is Z_q; GF(8) uses x^3+x^2+1, GF(9) uses x^2+2x+2; other prime powers
    /// use the smallest irreducible monic polynomial.
    static SymbolDomain field(std::size_t q) {
        const auto [p, k] = prime_power(q);
        if (p == 0) {
            throw std::domain_error(std::to_string(q) + " is not a prime power");
        }
        if (k == 1) {
            return field(p, 1, {1, 0});
        }
        if (q == 8) return field(2, 3, {1, 1, 0, 1});
        if (q == 9) return field(3, 2, {1, 2, 2});
        return field(p, k, smallest_irreducible(p, k));
    }

    Kind kind() const noexcept { return kind_; }
    bool is_field() const noexcept { return kind_ == Kind::field_gf; }
    std::size_t n() const noexcept { return n_; }
    std::size_t characteristic() const noexcept { return p_; }
    std::size_t degree() const noexcept { return k_; }
    const std::vector<int>& polynomial() const noexcept { return poly_; }

    Symbol add(Symbol x, Symbol y) const {
        check(x, y);
        return add_[x * n_ + y];
    }

    Symbol mul(Symbol x, Symbol y) const {
        check(x, y);
        if (!mul_allowed_) {
            throw std::domain_error("multiplication on Z_" + std::to_string(n_) +
                                    " requires an explicit override");
        }
        return mul_[x * n_ + y];
    }

    std::string describe() const {
        if (kind_ == Kind::ring_mod_n) {
            return "Z_" + std::to_string(n_);
        }
        std::string s = "GF(" + std::to_string(n_) + ") mod ";
        for (std::size_t i = 0; i < poly_.size(); ++i) {
            const auto power = poly_.size() - 1 - i;
            if (poly_[i] == 0) continue;
            if (s.back() != ' ') s += "+";
            if (poly_[i] != 1 || power == 0) s += std::to_string(poly_[i]);
            if (power >= 1) s += "x";
            if (power >= 2) s += "^" + std::to_string(power);
        }
        return s;
    }

    static bool is_prime(std::size_t v) {
        if (v < 2) return false;
        for (std::size_t f = 2; f * f <= v; ++f) {
            if (v % f == 0) return false;
        }
        return true;
    }

    /// (p, k) with q = p^k, or (0, 0) if q is not a prime power.
    static std::pair<std::size_t, std::size_t> prime_power(std::size_t q) {
        if (q < 2) return {0, 0};
        std::size_t p = 2;
        while (q % p != 0) ++p;
        std::size_t k = 0;
        while (q % p == 0) {
            q /= p;
            ++k;
        }
        return q == 1 ? std::pair{p, k} : std::pair<std::size_t, std::size_t>{0, 0};
    }

    /// Irreducibility over Z_p by trial division with every monic polynomial
    /// of degree 1..k/2 (coefficients highest first).
    static bool is_irreducible(std::size_t p, const std::vector<int>& poly) {
        const auto k = poly.size() - 1;
        for (std::size_t deg = 1; deg <= k / 2; ++deg) {
            std::size_t combos = 1;
            for (std::size_t i = 0; i < deg; ++i) combos *= p;
            for (std::size_t code = 0; code < combos; ++code) {
                std::vector<int> divisor(deg + 1);
                divisor[0] = 1;
                auto c = code;
                for (std::size_t i = deg; i >= 1; --i) {
                    divisor[i] = static_cast<int>(c % p);
                    c /= p;
                }
                if (divides(p, divisor, poly)) return false;
            }
        }
        return true;
    }

private:
    SymbolDomain() = default;

    template <class Add, class Mul>
    void build_tables(Add add, Mul mul) {
        add_.resize(n_ * n_);
        mul_.resize(n_ * n_);
        for (std::size_t x = 0; x < n_; ++x) {
            for (std::size_t y = 0; y < n_; ++y) {
                add_[x * n_ + y] = static_cast<Symbol>(add(x, y));
                mul_[x * n_ + y] = static_cast<Symbol>(mul(x, y));
            }
        }
    }

    void check(Symbol x, Symbol y) const {
        if (x >= n_ || y >= n_) {
            throw std::domain_error("symbol outside domain of size " + std::to_string(n_));
        }
    }

    // Coefficients lowest degree first.
    std::vector<std::size_t> digits(std::size_t x) const {
        std::vector<std::size_t> c(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            c[i] = x % p_;
            x /= p_;
        }
        return c;
    }

    std::size_t undigits(const std::vector<std::size_t>& c) const {
        std::size_t x = 0;
        for (std::size_t i = k_; i-- > 0;) x = x * p_ + c[i];
        return x;
    }

    std::size_t poly_add(std::size_t x, std::size_t y) const {
        auto a = digits(x);
        const auto b = digits(y);
        for (std::size_t i = 0; i < k_; ++i) a[i] = (a[i] + b[i]) % p_;
        return undigits(a);
    }

    std::size_t poly_mul(std::size_t x, std::size_t y) const {
        const auto a = digits(x);
        const auto b = digits(y);
        std::vector<std::size_t> r(2 * k_ - 1, 0);
        for (std::size_t i = 0; i < k_; ++i) {
            for (std::size_t j = 0; j < k_; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p_;
        }
        // Reduce: x^k = -(lower terms of the modulus).
        for (std::size_t deg = r.size(); deg-- > k_;) {
            const auto lead = r[deg];
            if (lead == 0) continue;
            for (std::size_t i = 0; i <= k_; ++i) {
                const auto coef = static_cast<std::size_t>(poly_[k_ - i]);  // coefficient of x^i
                r[deg - k_ + i] = (r[deg - k_ + i] + p_ * p_ - (lead * coef) % p_) % p_;
            }
        }
        r.resize(k_);
        return undigits(r);
    }

    static bool divides(std::size_t p, const std::vector<int>& divisor, const std::vector<int>& poly) {
        std::vector<long> rem(poly.begin(), poly.end());
        const auto dd = divisor.size() - 1;
        const auto pp = static_cast<long>(p);
        for (std::size_t i = 0; i + dd < rem.size(); ++i) {
            const long lead = ((rem[i] % pp) + pp) % pp;
            if (lead == 0) continue;
            for (std::size_t j = 0; j <= dd; ++j) {
                rem[i + j] = (((rem[i + j] - lead * divisor[j]) % pp) + pp) % pp;
            }
        }
        for (std::size_t i = rem.size() - dd; i < rem.size(); ++i) {
            if (((rem[i] % pp) + pp) % pp != 0) return false;
        }
        return true;
    }

    static std::vector<int> smallest_irreducible(std::size_t p, std::size_t k) {
        std::size_t combos = 1;
        for (std::size_t i = 0; i < k; ++i) combos *= p;
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<int> poly(k + 1);
            poly[0] = 1;
            auto c = code;
            for (std::size_t i = k; i >= 1; --i) {
                poly[i] = static_cast<int>(c % p);
                c /= p;
            }
            if (is_irreducible(p, poly)) return poly;
        }
        throw std::logic_error("no irreducible polynomial found");
    }

    Kind kind_ = Kind::ring_mod_n;
    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::size_t k_ = 0;
    std::vector<int> poly_;
    bool mul_allowed_ = false;
    std::vector<Symbol> add_;
    std::vector<Symbol> mul_;
};

/// Which affine operations generate the orbit of a representative.
struct OpSet {
    bool scale_value = false;  // a * pi(x)
    bool shift_arg = false;    // pi(x + b)
    bool shift_value = false;  // pi(x) + c

    /// Parses the CLI spelling: any combination of 'a', 'b', 'c'.
    static OpSet parse(std::string_view spec) {
        OpSet ops;
        for (char ch : spec) {
            switch (ch) {
                case 'a': ops.scale_value = true; break;
                case 'b': ops.shift_arg = true; break;
                case 'c': ops.shift_value = true; break;
                default: throw std::domain_error("unknown operation '" + std::string(1, ch) + "' (use a, b, c)");
            }
        }
        return ops;
    }

    std::string to_string() const {
        std::string s;
        if (scale_value) s += 'a';
        if (shift_arg) s += 'b';
        if (shift_value) s += 'c';
        return s.empty() ? "id" : s;
    }
};

/// x -> a * p(x + b) + c. Inactive operations hold their neutral value.
struct Automorphism {
    Symbol a = 1;
    Symbol b = 0;
    Symbol c = 0;

    friend bool operator==(const Automorphism&, const Automorphism&) = default;
};

inline void validate(const SymbolDomain& dom, const Automorphism& g) {
    if (g.a >= dom.n() || g.b >= dom.n() || g.c >= dom.n()) {
        throw std::domain_error("automorphism parameter outside the domain");
    }
    if (g.a != 1 && !dom.is_field()) {
        throw std::domain_error("scaling requires a field domain");
    }
    if (g.a == 0) {
        throw std::domain_error("scaling constant must be nonzero");
    }
}

inline Permutation apply_automorphism(const SymbolDomain& dom, const Automorphism& g, const Permutation& p) {
    if (p.size() != dom.n()) {
        throw std::domain_error("permutation length does not match domain size");
    }
    validate(dom, g);
    std::vector<Symbol> out(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) {
        const Symbol image = p[dom.add(static_cast<Symbol>(x), g.b)];
        const Symbol scaled = g.a == 1 ? image : dom.mul(g.a, image);
        out[x] = dom.add(scaled, g.c);
    }
    return Permutation(std::move(out));
}

/// The automorphism equal to applying `first` and then `second`.
inline Automorphism then(const SymbolDomain& dom, const Automorphism& first, const Automorphism& second) {
    validate(dom, first);
    validate(dom, second);
    const auto times = [&](Symbol x, Symbol y) { return x == 1 ? y : y == 1 ? x : dom.mul(x, y); };
    return Automorphism{times(second.a, first.a), dom.add(first.b, second.b),
                        dom.add(times(second.a, first.c), second.c)};
}

/// Every group element generated by `ops`, scale-major, then b, then c.
inline std::vector<Automorphism> group_elements(const SymbolDomain& dom, OpSet ops) {
    if (ops.scale_value && !dom.is_field()) {
        throw std::domain_error("scale_value requires a field domain");
    }
    const auto n = dom.n();
    std::vector<Automorphism> out;
    for (std::size_t a = 1; a < (ops.scale_value ? n : 2); ++a) {
        for (std::size_t b = 0; b < (ops.shift_arg ? n : 1); ++b) {
            for (std::size_t c = 0; c < (ops.shift_value ? n : 1); ++c) {
                out.push_back({static_cast<Symbol>(a), static_cast<Symbol>(b), static_cast<Symbol>(c)});
            }
        }
    }
    return out;
}

struct OrbitOrigin {
    std::size_t rep = 0;
    Automorphism element;
};

/// Images of p under every group element, in group_elements() order (may
/// contain repeats when the stabiliser is nontrivial).
inline std::vector<Permutation> orbit(const SymbolDomain& dom, const std::vector<Automorphism>& group,
                                      const Permutation& p) {
    std::vector<Permutation> out;
    out.reserve(group.size());
    for (const auto& g : group) {
        out.push_back(apply_automorphism(dom, g, p));
    }
    return out;
}

/// Union of the orbits of all representatives, deduplicated keeping the first
/// occurrence in rep-major, group-element-minor order.
inline PermArray expand_orbits(const SymbolDomain& dom, const PermArray& reps, OpSet ops,
                               std::vector<OrbitOrigin>* origins = nullptr) {
    if (reps.n() != dom.n()) {
        throw std::domain_error("representatives have " + std::to_string(reps.n()) +
                                " symbols but the domain has " + std::to_string(dom.n()));
    }
    const auto group = group_elements(dom, ops);
    std::vector<std::vector<Permutation>> images(reps.size());
    parallel_for(reps.size(), [&](std::size_t, std::size_t r) { images[r] = orbit(dom, group, reps[r]); });

    PermArray out(dom.n(), "expand ops=" + ops.to_string() + " domain=" + dom.describe() +
                               " reps=" + std::to_string(reps.size()));
    out.set_claimed_d(reps.claimed_d());
    if (origins != nullptr) origins->clear();
    for (std::size_t r = 0; r < images.size(); ++r) {
        for (std::size_t g = 0; g < images[r].size(); ++g) {
            if (out.add(images[r][g]) && origins != nullptr) {
                origins->push_back({r, group[g]});
            }
        }
    }
    return out;
}

struct RepSearchOptions {
    /// Refuse when the canonical candidate pool exceeds this many members.
    std::size_t candidate_guard = 5'000'000;
};

namespace detail {

/// Canonical orbit members: p(0) = 0 when values shift, and additionally
/// p(1) = 1 when values also scale over a field.
inline std::vector<Permutation> canonical_candidates(std::size_t n, OpSet ops, std::size_t guard) {
    const std::size_t pinned = ops.shift_value ? (ops.scale_value && n >= 2 ? 2 : 1) : 0;
    std::size_t count = 1;
    for (std::size_t k = 2; k <= n - pinned; ++k) {
        count *= k;
        if (count > guard) {
            throw std::domain_error("representative search space exceeds the candidate guard");
        }
    }
    std::vector<Symbol> s(n);
    std::iota(s.begin(), s.end(), Symbol{0});
    std::vector<Permutation> out;
    out.reserve(count);
    do {
        out.emplace_back(s);
    } while (std::next_permutation(s.begin() + static_cast<std::ptrdiff_t>(pinned), s.end()));
    return out;
}

}  // namespace detail

/// Greedy-with-restarts search for representatives whose orbits form a code
/// at distance >= dist. Each restart visits the canonical candidates in a
/// fresh random order and accepts a candidate iff its orbit is internally at
/// distance >= dist and at distance >= dist from every accepted orbit. The
/// largest accepted list over `restarts` restarts is returned.
inline PermArray rep_search(const SymbolDomain& dom, std::size_t dist, OpSet ops, std::size_t restarts,
                            std::uint64_t rng_seed, const RepSearchOptions& options = {}) {
    if (dist < 1) {
        throw std::domain_error("rep_search distance must be >= 1");
    }
    const auto n = dom.n();
    const auto group = group_elements(dom, ops);
    const auto candidates = detail::canonical_candidates(n, ops, options.candidate_guard);

    struct Outcome {
        std::vector<std::size_t> accepted;
    };
    std::vector<Outcome> outcomes(restarts);

    parallel_for(restarts, [&](std::size_t, std::size_t r) {
        Rng rng(derive_seed(rng_seed, r));
        std::vector<std::size_t> order(candidates.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order.begin(), order.end());

        std::vector<std::vector<Symbol>> kept_positions;
        auto& accepted = outcomes[r].accepted;
        for (const auto idx : order) {
            const auto images = orbit(dom, group, candidates[idx]);
            std::vector<std::vector<Symbol>> image_positions;
            image_positions.reserve(images.size());
            bool ok = true;
            for (std::size_t i = 0; i < images.size() && ok; ++i) {
                for (const auto& kp : kept_positions) {
                    if (detail::kendall_from_positions(kp, images[i].symbols()) < dist) {
                        ok = false;
                        break;
                    }
                }
                for (std::size_t j = 0; j < i && ok; ++j) {
                    if (detail::kendall_from_positions(image_positions[j], images[i].symbols()) < dist) ok = false;
                }
                image_positions.push_back(images[i].positions());
            }
            if (ok) {
                accepted.push_back(idx);
                for (auto& pos : image_positions) kept_positions.push_back(std::move(pos));
            }
        }
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (outcomes[r].accepted.size() > outcomes[best].accepted.size()) best = r;
    }
    PermArray reps(n, "rep_search ops=" + ops.to_string() + " domain=" + dom.describe() +
                          " d=" + std::to_string(dist) + " restarts=" + std::to_string(restarts) +
                          " rng=" + std::string(Rng::kName) + " seed=" + std::to_string(rng_seed));
    reps.set_claimed_d(dist);
    if (restarts > 0) {
        for (const auto idx : outcomes[best].accepted) reps.add(candidates[idx]);
    }
    return reps;
}

}  // namespace kpa
