#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

namespace kpa::bounds {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& v) { return v.str(); }

/// 1049633 -> "1,049,633".
inline std::string with_commas(const BigInt& v) {
    auto s = v.str();
    std::string out;
    const auto len = s.size();
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(s[i]);
        const auto rest = len - 1 - i;
        if (rest > 0 && rest % 3 == 0 && s[i] != '-') out.push_back(',');
    }
    return out;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

inline BigInt factorial(std::size_t n) {
    BigInt f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

/// A table cell: P(n,d), P(n,m,d) or P(n,d;positions).
struct CellKey {
    std::size_t n = 0;
    std::size_t m = 0;  // 0: no restriction
    std::string positions;
    std::size_t d = 0;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;

    bool is_full() const { return m == 0 && positions.empty(); }

    std::string label() const {
        std::string s = "P(" + std::to_string(n);
        if (m != 0) s += "," + std::to_string(m);
        s += "," + std::to_string(d);
        if (!positions.empty()) s += ";" + positions;
        return s + ")";
    }
};

namespace rule {
inline constexpr const char* claimed = "claimed";
inline constexpr const char* certified = "certified";
inline constexpr const char* formula_bm = "formula-bm";
inline constexpr const char* formula_wzyg = "formula-wzyg";
inline constexpr const char* formula_shrink = "formula-shrink";
inline constexpr const char* halve = "halve";
inline constexpr const char* shrink = "shrink";
inline constexpr const char* insert = "insert";
inline constexpr const char* compose = "compose";
inline constexpr const char* sum = "placement-sum";
inline constexpr const char* product_form = "product-form";
}  // namespace rule

inline const std::string kPublished = "published, not desk-certified";

/// One lower bound with how it was obtained.
struct BoundRecord {
    std::string id;
    CellKey cell;
    BigInt value = 0;
    std::string rule = rule::claimed;
    std::vector<std::string> antecedents;
    std::string note;
    std::string provenance;
    /// Figure printed by the source for this derivation, when one exists.
    std::optional<BigInt> stated;
    std::vector<std::string> flags;

    bool is_leaf() const { return rule == rule::claimed || rule == rule::certified; }
};

/// A derivation to evaluate once its antecedents are available. Stored in the
/// database file as a record line without a value.
struct Recipe {
    std::string id;
    CellKey cell;
    std::string rule;
    std::vector<std::string> antecedents;
    std::string note;
    std::optional<BigInt> stated;
    std::vector<std::string> flags;
};

class BoundsDb {
public:
    const std::vector<BoundRecord>& records() const noexcept { return records_; }
    const std::vector<Recipe>& recipes() const noexcept { return recipes_; }

    const BoundRecord* find(const std::string& id) const {
        const auto it = by_id_.find(id);
        return it == by_id_.end() ? nullptr : &records_[it->second];
    }

    const BoundRecord& at(const std::string& id) const {
        if (const auto* r = find(id)) return *r;
        throw std::out_of_range("no bound record with id '" + id + "'");
    }

    /// Best (largest) record for a cell, if any.
    const BoundRecord* best(const CellKey& cell) const {
        const auto it = best_.find(cell);
        return it == best_.end() ? nullptr : &records_[it->second];
    }

    std::optional<BigInt> best_value(const CellKey& cell) const {
        if (const auto* r = best(cell)) return r->value;
        return std::nullopt;
    }

    /// Every record attached to `cell`.
    std::vector<const BoundRecord*> at_cell(const CellKey& cell) const {
        std::vector<const BoundRecord*> out;
        for (const auto& r : records_) {
            if (r.cell == cell) out.push_back(&r);
        }
        return out;
    }

    std::vector<CellKey> cells() const {
        std::vector<CellKey> out;
        out.reserve(best_.size());
        for (const auto& [k, _] : best_) out.push_back(k);
        return out;
    }

    /// Adds a record; antecedents must already be present, which keeps the
    /// derivation graph acyclic. An empty id is replaced by a generated one.
    const BoundRecord& add(BoundRecord r) {
        if (r.value < 1) {
            throw std::domain_error("bound value must be >= 1 for " + r.cell.label());
        }
        if (r.id.empty()) r.id = "r" + std::to_string(records_.size());
        if (by_id_.contains(r.id) || recipe_ids_.contains(r.id)) {
            throw std::domain_error("duplicate bound id '" + r.id + "'");
        }
        for (const auto& a : r.antecedents) {
            if (!by_id_.contains(a)) {
                throw std::domain_error("record '" + r.id + "' cites unknown antecedent '" + a + "'");
            }
        }
        const auto index = records_.size();
        by_id_.emplace(r.id, index);
        const auto it = best_.find(r.cell);
        if (it == best_.end() || records_[it->second].value < r.value) best_[r.cell] = index;
        records_.push_back(std::move(r));
        return records_.back();
    }

    void add_recipe(Recipe r) {
        if (r.id.empty()) r.id = "recipe" + std::to_string(recipes_.size());
        if (by_id_.contains(r.id) || recipe_ids_.contains(r.id)) {
            throw std::domain_error("duplicate bound id '" + r.id + "'");
        }
        recipe_ids_.insert(r.id);
        recipes_.push_back(std::move(r));
    }

    void clear_recipes() {
        recipes_.clear();
        recipe_ids_.clear();
    }

    void remove_recipe_id(const std::string& id) { recipe_ids_.erase(id); }

private:
    std::vector<BoundRecord> records_;
    std::vector<Recipe> recipes_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::set<std::string> recipe_ids_;
    std::map<CellKey, std::size_t> best_;
};

// ---------------------------------------------------------------------------
// Closed-form bounds for d = 2t+1 when n-2 is a prime power.

namespace detail {

inline bool is_prime_power(std::size_t q) {
    if (q < 2) return false;
    std::size_t p = 2;
    while (q % p != 0) ++p;
    while (q % p == 0) q /= p;
    return q == 1;
}

/// m = ((n-2)^{t+1} - 1) / (n-3).
inline BigInt formula_m(std::size_t n, std::size_t t) {
    if (n < 4) throw std::domain_error("formula bounds need n >= 4");
    if (t < 1) throw std::domain_error("formula bounds need t >= 1");
    if (!is_prime_power(n - 2)) {
        throw std::domain_error("formula bounds need n-2 to be a prime power; n-2 = " + std::to_string(n - 2));
    }
    BigInt power = 1;
    for (std::size_t i = 0; i <= t; ++i) power *= (n - 2);
    return (power - 1) / (n - 3);
}

inline BigInt formula_denominator(const std::string& which, std::size_t n, std::size_t t) {
    const auto m = formula_m(n, t);
    if (which == rule::formula_bm) return BigInt(t) * (t + 1) * m;
    return BigInt(2 * t + 1) * m;
}

}  // namespace detail

/// P(n, 2t+1) >= floor(n! / (t(t+1) m)).
inline BoundRecord formula_bound_bm(std::size_t n, std::size_t t) {
    BoundRecord r;
    r.cell = {n, 0, "", 2 * t + 1};
    r.value = factorial(n) / detail::formula_denominator(rule::formula_bm, n, t);
    r.rule = rule::formula_bm;
    r.id = "bm-n" + std::to_string(n) + "-t" + std::to_string(t);
    r.provenance = "closed form";
    return r;
}

/// P(n, 2t+1) >= floor(n! / ((2t+1) m)).
inline BoundRecord formula_bound_wzyg(std::size_t n, std::size_t t) {
    BoundRecord r;
    r.cell = {n, 0, "", 2 * t + 1};
    r.value = factorial(n) / detail::formula_denominator(rule::formula_wzyg, n, t);
    r.rule = rule::formula_wzyg;
    r.id = "wzyg-n" + std::to_string(n) + "-t" + std::to_string(t);
    r.provenance = "closed form";
    return r;
}

/// P(n-1, d) >= floor(n! / (D * n)) for a closed-form record P(n,d) >= n!/D:
/// the shrink rule applied to the exact quotient before rounding.
inline BoundRecord formula_shrink(const BoundRecord& formula) {
    if (formula.rule != rule::formula_bm && formula.rule != rule::formula_wzyg) {
        throw std::domain_error("formula_shrink needs a closed-form record");
    }
    const auto n = formula.cell.n;
    const auto t = (formula.cell.d - 1) / 2;
    BoundRecord r;
    r.cell = {n - 1, 0, "", formula.cell.d};
    r.value = factorial(n) / (detail::formula_denominator(formula.rule, n, t) * n);
    r.rule = rule::formula_shrink;
    r.antecedents = {formula.id};
    r.id = formula.id + "-shrink";
    r.provenance = "derived";
    return r;
}

// ---------------------------------------------------------------------------
// Rule arithmetic.

using Lookup = std::function<const BoundRecord*(const std::string&)>;

struct Evaluation {
    BigInt value = 0;
    std::vector<std::string> flags;
};

/// Evaluates `rule` for a target cell from its antecedents. Throws when the
/// antecedents do not fit the rule's shape.
inline Evaluation evaluate_rule(const std::string& rule_name, const CellKey& target,
                                const std::vector<const BoundRecord*>& ants) {
    const auto need = [&](std::size_t count) {
        if (ants.size() != count) {
            throw std::domain_error(rule_name + " for " + target.label() + " needs " + std::to_string(count) +
                                    " antecedent(s), got " + std::to_string(ants.size()));
        }
    };
    const auto shape = [&](bool ok, const std::string& what) {
        if (!ok) throw std::domain_error(rule_name + " for " + target.label() + ": " + what);
    };
    Evaluation e;
    if (rule_name == rule::halve) {
        need(1);
        const auto& a = ants[0]->cell;
        shape(a.is_full() && target.is_full() && a.n == target.n && a.d % 2 == 1 && target.d == a.d + 1,
              "expects P(n,d) with odd d -> P(n,d+1)");
        e.value = ceil_div(ants[0]->value, 2);
    } else if (rule_name == rule::shrink) {
        need(1);
        const auto& a = ants[0]->cell;
        shape(a.is_full() && target.is_full() && a.n == target.n + 1 && a.d == target.d,
              "expects P(n+1,d) -> P(n,d)");
        e.value = ceil_div(ants[0]->value, a.n);
    } else if (rule_name == rule::insert) {
        need(1);
        const auto& a = ants[0]->cell;
        shape(a.is_full() && target.is_full() && a.n + 1 == target.n && a.d == target.d,
              "expects P(n,d) -> P(n+1,d)");
        e.value = ceil_div(BigInt(target.n), target.d) * ants[0]->value;
    } else if (rule_name == rule::compose) {
        need(2);
        const auto* outer = ants[0]->cell.m != 0 ? ants[0] : ants[1];
        const auto* inner = ants[0]->cell.m != 0 ? ants[1] : ants[0];
        shape(outer->cell.m != 0 && inner->cell.is_full() && target.is_full(),
              "expects one P(n,m,d) and one P(n-m,d)");
        shape(outer->cell.n == target.n && inner->cell.n + outer->cell.m == target.n &&
                  outer->cell.d == target.d && inner->cell.d == target.d,
              "dimension mismatch");
        e.value = outer->value * inner->value;
    } else if (rule_name == rule::sum) {
        shape(!ants.empty(), "needs at least one term");
        for (const auto* a : ants) {
            shape(a->cell.d == target.d, "term " + a->cell.label() + " has a different distance");
            e.value += a->value;
        }
        const bool mixed = std::any_of(ants.begin(), ants.end(), [&](const BoundRecord* a) { return a->cell.n != target.n; });
        if (mixed) e.flags.push_back("mixed-n: some terms are stated for fewer symbols than the target");
    } else if (rule_name == rule::product_form) {
        need(0);
        shape(target.m != 0 && target.positions.empty(), "expects a P(n,m,d) cell");
        e.value = 1;
        for (std::size_t i = 0; i < target.m; ++i) e.value *= ceil_div(BigInt(target.n - i), target.d);
    } else if (rule_name == rule::formula_bm || rule_name == rule::formula_wzyg) {
        need(0);
        shape(target.is_full() && target.d % 2 == 1, "expects P(n,2t+1)");
        const auto t = (target.d - 1) / 2;
        e.value = factorial(target.n) / detail::formula_denominator(rule_name, target.n, t);
    } else if (rule_name == rule::formula_shrink) {
        need(1);
        const auto& f = *ants[0];
        shape(f.rule == rule::formula_bm || f.rule == rule::formula_wzyg, "antecedent must be a closed form");
        shape(f.cell.n == target.n + 1 && f.cell.d == target.d, "expects P(n+1,d) closed form -> P(n,d)");
        const auto t = (f.cell.d - 1) / 2;
        e.value = factorial(f.cell.n) / (detail::formula_denominator(f.rule, f.cell.n, t) * f.cell.n);
    } else {
        throw std::domain_error("unknown rule '" + rule_name + "'");
    }
    return e;
}

/// Recomputes a record's value from its antecedents. Leaves return their own value.
inline BigInt reevaluate(const BoundRecord& r, const BoundsDb& db) {
    if (r.is_leaf()) return r.value;
    std::vector<const BoundRecord*> ants;
    for (const auto& id : r.antecedents) ants.push_back(&db.at(id));
    return evaluate_rule(r.rule, r.cell, ants).value;
}

/// True iff every record in the derivation tree of `id` re-evaluates to its
/// stored value.
inline bool verify_trace(const BoundsDb& db, const std::string& id) {
    const auto& r = db.at(id);
    if (reevaluate(r, db) != r.value) return false;
    return std::all_of(r.antecedents.begin(), r.antecedents.end(),
                       [&](const std::string& a) { return verify_trace(db, a); });
}

inline std::string describe_step(const BoundRecord& r, const BoundsDb& db) {
    std::ostringstream os;
    os << r.cell.label() << " >= " << with_commas(r.value) << "  [" << r.rule;
    if (r.rule == rule::insert) {
        os << ": ceil(" << r.cell.n << "/" << r.cell.d << ")=" << ceil_div(BigInt(r.cell.n), r.cell.d) << " x "
           << db.at(r.antecedents.at(0)).cell.label();
    } else if (r.rule == rule::halve) {
        os << ": ceil(" << db.at(r.antecedents.at(0)).cell.label() << "/2)";
    } else if (r.rule == rule::shrink) {
        os << ": ceil(" << db.at(r.antecedents.at(0)).cell.label() << "/" << r.cell.n + 1 << ")";
    } else if (!r.antecedents.empty()) {
        os << ":";
        for (std::size_t i = 0; i < r.antecedents.size(); ++i) {
            os << (i == 0 ? " " : (r.rule == rule::sum ? " + " : " x ")) << db.at(r.antecedents[i]).cell.label();
        }
    }
    os << "] id=" << r.id;
    if (!r.provenance.empty()) os << " (" << r.provenance << ")";
    if (r.stated && *r.stated != r.value) os << " stated=" << with_commas(*r.stated);
    for (const auto& f : r.flags) os << " FLAG{" << f << "}";
    return os.str();
}

/// Indented derivation tree of a record, one step per line.
inline std::vector<std::string> trace(const BoundsDb& db, const std::string& id) {
    std::vector<std::string> lines;
    std::function<void(const std::string&, std::size_t)> walk = [&](const std::string& rid, std::size_t depth) {
        const auto& r = db.at(rid);
        lines.push_back(std::string(2 * depth, ' ') + describe_step(r, db));
        for (const auto& a : r.antecedents) walk(a, depth + 1);
    };
    walk(id, 0);
    return lines;
}

// ---------------------------------------------------------------------------
// Composer.

struct Window {
    std::size_t n_min = 4;
    std::size_t n_max = 20;
    std::size_t d_min = 1;
    std::size_t d_max = 0;  // 0: n(n-1)/2 for each n

    bool contains(std::size_t n, std::size_t d) const {
        if (n < n_min || n > n_max || d < d_min) return false;
        const auto cap = n * (n - 1) / 2;
        return d <= (d_max == 0 ? cap : std::min(d_max, cap));
    }
};

struct ComposeOptions {
    Window window{};
    /// Largest m for which product-form P(n,m,d) records are generated.
    std::size_t product_form_max_m = 6;
    /// Safety cap on fixed-point rounds.
    std::size_t max_rounds = 10'000;
};

struct ComposeResult {
    BoundsDb db;
    std::size_t rounds = 0;
    std::vector<std::string> unresolved_recipes;
};

namespace detail {

inline std::string stated_mismatch(const BigInt& stated, const BigInt& computed) {
    return "stated-mismatch: source prints " + with_commas(stated) + ", arithmetic gives " + with_commas(computed);
}

inline bool offer(BoundsDb& db, BoundRecord r) {
    const auto current = db.best_value(r.cell);
    if (current && *current >= r.value) return false;
    db.add(std::move(r));
    return true;
}

}  // namespace detail

/// Closure of a bounds database: evaluates recipes, then applies the halving,
/// shrink, insertion, composition and product-form rules to a fixed point
/// inside the window. Derived records are only kept when they improve their
/// cell, so the best value per cell is the least fixed point and does not
/// depend on rule order.
inline ComposeResult compose_bounds(const BoundsDb& input, const ComposeOptions& options = {}) {
    ComposeResult result;
    auto& db = result.db;
    for (const auto& r : input.records()) db.add(r);

    // Recipes, in dependency order.
    std::vector<Recipe> pending = input.recipes();
    for (bool progress = true; progress && !pending.empty();) {
        progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            const bool ready = std::all_of(it->antecedents.begin(), it->antecedents.end(),
                                           [&](const std::string& a) { return db.find(a) != nullptr; });
            if (!ready) {
                ++it;
                continue;
            }
            std::vector<const BoundRecord*> ants;
            for (const auto& a : it->antecedents) ants.push_back(db.find(a));
            auto e = evaluate_rule(it->rule, it->cell, ants);
            BoundRecord r;
            r.id = it->id;
            r.cell = it->cell;
            r.value = e.value;
            r.rule = it->rule;
            r.antecedents = it->antecedents;
            r.note = it->note;
            r.stated = it->stated;
            r.provenance = "derived";
            r.flags = it->flags;
            for (auto& f : e.flags) r.flags.push_back(std::move(f));
            if (r.stated && *r.stated != r.value) r.flags.push_back(detail::stated_mismatch(*r.stated, r.value));
            db.add(std::move(r));
            it = pending.erase(it);
            progress = true;
        }
    }
    for (const auto& r : pending) result.unresolved_recipes.push_back(r.id);

    const auto& w = options.window;
    const auto tag = [](const std::string& rule_name, const CellKey& c) {
        return rule_name + ":" + c.label();
    };

    // Product-form records for restricted cells.
    for (std::size_t n = w.n_min; n <= w.n_max; ++n) {
        for (std::size_t m = 1; m <= std::min(options.product_form_max_m, n - 1); ++m) {
            for (std::size_t d = std::max<std::size_t>(w.d_min, 1); w.contains(n, d); ++d) {
                BoundRecord r;
                r.cell = {n, m, "", d};
                r.rule = rule::product_form;
                r.value = evaluate_rule(r.rule, r.cell, {}).value;
                if (r.value <= 1) break;  // larger d only gives 1
                r.id = tag(r.rule, r.cell);
                r.provenance = "derived";
                detail::offer(db, std::move(r));
            }
        }
    }

    const auto derive = [&](const std::string& rule_name, const CellKey& target,
                            std::vector<const BoundRecord*> ants) -> bool {
        if (!w.contains(target.n, target.d)) return false;
        auto e = evaluate_rule(rule_name, target, ants);
        const auto current = db.best_value(target);
        if (current && *current >= e.value) return false;
        BoundRecord r;
        r.cell = target;
        r.value = e.value;
        r.rule = rule_name;
        for (const auto* a : ants) r.antecedents.push_back(a->id);
        r.id = tag(rule_name, target) + "#" + std::to_string(db.records().size());
        r.provenance = "derived";
        r.flags = std::move(e.flags);
        db.add(std::move(r));
        return true;
    };

    for (bool changed = true; changed && result.rounds < options.max_rounds;) {
        changed = false;
        ++result.rounds;
        for (const auto& cell : db.cells()) {
            if (!cell.is_full()) continue;
            const auto* src = db.best(cell);
            if (cell.d % 2 == 1) changed |= derive(rule::halve, {cell.n, 0, "", cell.d + 1}, {src});
            src = db.best(cell);
            if (cell.n > 1) changed |= derive(rule::shrink, {cell.n - 1, 0, "", cell.d}, {src});
            src = db.best(cell);
            changed |= derive(rule::insert, {cell.n + 1, 0, "", cell.d}, {src});
        }
        for (const auto& cell : db.cells()) {
            if (cell.m == 0 || !cell.positions.empty() || cell.m >= cell.n) continue;
            const auto* inner = db.best({cell.n - cell.m, 0, "", cell.d});
            if (inner == nullptr) continue;
            changed |= derive(rule::compose, {cell.n, 0, "", cell.d}, {db.best(cell), inner});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Serialization: one JSON object per line with fields id, n, m, positions, d,
// value, rule, antecedents, note (plus provenance, stated, flags). A line
// without a value is a recipe.

namespace detail {

inline BigInt parse_big(const nlohmann::json& j, const char* field) {
    if (j.is_number_unsigned() || j.is_number_integer()) return BigInt(j.get<long long>());
    if (j.is_string()) {
        std::string digits;
        for (char c : j.get<std::string>()) {
            if (c == ',' || c == '_') continue;
            if (c < '0' || c > '9') throw std::domain_error(std::string("bad integer in field ") + field);
            digits.push_back(c);
        }
        if (digits.empty()) throw std::domain_error(std::string("empty integer in field ") + field);
        return BigInt(digits);
    }
    throw std::domain_error(std::string("field ") + field + " must be an integer or digit string");
}

inline CellKey parse_cell(const nlohmann::json& j) {
    CellKey c;
    c.n = j.at("n").get<std::size_t>();
    c.d = j.at("d").get<std::size_t>();
    if (j.contains("m") && !j["m"].is_null()) c.m = j["m"].get<std::size_t>();
    if (j.contains("positions") && !j["positions"].is_null()) c.positions = j["positions"].get<std::string>();
    return c;
}

template <class T>
void put_cell(nlohmann::ordered_json& j, const T& r) {
    j["id"] = r.id;
    j["n"] = r.cell.n;
    j["m"] = r.cell.m == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.cell.m);
    j["positions"] = r.cell.positions.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.cell.positions);
    j["d"] = r.cell.d;
}

}  // namespace detail

inline std::string to_json_line(const BoundRecord& r) {
    nlohmann::ordered_json j;
    detail::put_cell(j, r);
    j["value"] = r.value.str();
    j["rule"] = r.rule;
    j["antecedents"] = r.antecedents;
    j["note"] = r.note;
    if (!r.provenance.empty()) j["provenance"] = r.provenance;
    if (r.stated) j["stated"] = r.stated->str();
    if (!r.flags.empty()) j["flags"] = r.flags;
    return j.dump();
}

inline std::string to_json_line(const Recipe& r) {
    nlohmann::ordered_json j;
    detail::put_cell(j, r);
    j["rule"] = r.rule;
    j["antecedents"] = r.antecedents;
    j["note"] = r.note;
    if (r.stated) j["stated"] = r.stated->str();
    if (!r.flags.empty()) j["flags"] = r.flags;
    return j.dump();
}

inline BoundsDb read_db(std::istream& in) {
    BoundsDb db;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::domain_error("bounds line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            const auto cell = detail::parse_cell(j);
            std::vector<std::string> ants;
            if (j.contains("antecedents")) ants = j["antecedents"].get<std::vector<std::string>>();
            std::vector<std::string> flags;
            if (j.contains("flags")) flags = j["flags"].get<std::vector<std::string>>();
            std::optional<BigInt> stated;
            if (j.contains("stated") && !j["stated"].is_null()) stated = detail::parse_big(j["stated"], "stated");
            const auto id = j.value("id", std::string{});
            const auto rule_name = j.value("rule", std::string(rule::claimed));
            const auto note = j.value("note", std::string{});
            if (j.contains("value") && !j["value"].is_null()) {
                BoundRecord r;
                r.id = id;
                r.cell = cell;
                r.value = detail::parse_big(j["value"], "value");
                r.rule = rule_name;
                r.antecedents = std::move(ants);
                r.note = note;
                r.provenance = j.value("provenance", std::string{});
                r.stated = stated;
                r.flags = std::move(flags);
                db.add(std::move(r));
            } else {
                db.add_recipe(Recipe{id, cell, rule_name, std::move(ants), note, stated, std::move(flags)});
            }
        } catch (const nlohmann::json::exception& e) {
            throw std::domain_error("bounds line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::domain_error& e) {
            throw std::domain_error("bounds line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return db;
}

inline BoundsDb read_db_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_db(in);
}

/// Records in insertion order (antecedents first), then pending recipes.
inline void write_db(std::ostream& out, const BoundsDb& db) {
    for (const auto& r : db.records()) out << to_json_line(r) << '\n';
    for (const auto& r : db.recipes()) out << to_json_line(r) << '\n';
}

// ---------------------------------------------------------------------------
// Tables.

struct TableSelector {
    /// Full cells P(n,d) with columns d, or restricted cells P(n,m,d) at a
    /// fixed d with columns m.
    bool restricted = false;
    std::size_t n_lo = 0;
    std::size_t n_hi = 0;
    std::vector<std::size_t> columns;
    std::size_t fixed_d = 0;
};

struct Table {
    std::string title;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> columns;
    std::vector<std::vector<std::optional<BigInt>>> cells;

    bool empty() const {
        for (const auto& row : cells) {
            for (const auto& c : row) {
                if (c) return false;
            }
        }
        return true;
    }
};

inline Table select_table(const BoundsDb& db, const TableSelector& sel) {
    Table t;
    t.title = sel.restricted ? "P(n,m," + std::to_string(sel.fixed_d) + ")  rows n, columns m"
                             : "P(n,d)  rows n, columns d";
    t.columns = sel.columns;
    for (std::size_t n = sel.n_lo; n <= sel.n_hi && sel.n_hi != 0; ++n) {
        t.rows.push_back(n);
        std::vector<std::optional<BigInt>> row;
        for (auto c : sel.columns) {
            const CellKey key = sel.restricted ? CellKey{n, c, "", sel.fixed_d} : CellKey{n, 0, "", c};
            row.push_back(db.best_value(key));
        }
        t.cells.push_back(std::move(row));
    }
    return t;
}

/// Aligned text; blank cells are left empty.
inline std::string render_text(const Table& t) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"n"};
    for (auto c : t.columns) header.push_back(std::to_string(c));
    grid.push_back(header);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::vector<std::string> row{std::to_string(t.rows[i])};
        for (const auto& c : t.cells[i]) row.push_back(c ? with_commas(*c) : "");
        grid.push_back(std::move(row));
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : grid) {
        for (std::size_t k = 0; k < row.size(); ++k) widths[k] = std::max(widths[k], row[k].size());
    }
    std::ostringstream os;
    os << t.title << '\n';
    for (const auto& row : grid) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            os << (k == 0 ? "" : "  ") << std::setw(static_cast<int>(widths[k])) << row[k];
        }
        os << '\n';
    }
    return os.str();
}

inline std::string render_csv(const Table& t) {
    std::ostringstream os;
    os << "n";
    for (auto c : t.columns) os << ',' << c;
    os << '\n';
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        os << t.rows[i];
        for (const auto& c : t.cells[i]) os << ',' << (c ? c->str() : "");
        os << '\n';
    }
    return os.str();
}

}  // namespace kpa::bounds
