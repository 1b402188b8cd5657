// kpa: permutation arrays under the Kendall-tau metric.
//
// Exit codes: 0 success, 2 certification failure, 1 usage or domain error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpa/algebra.hpp"
#include "kpa/bounds.hpp"
#include "kpa/clique.hpp"
#include "kpa/constructions.hpp"
#include "kpa/io.hpp"
#include "kpa/parallel.hpp"
#include "kpa/search.hpp"
#include "kpa/verifier.hpp"

#ifndef KPA_VERSION
#define KPA_VERSION "dev"
#endif

namespace {

using namespace kpa;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCertFail = 2;

struct Run {
    std::string command_line;
    std::string out_path;
    bool keep_order = false;
    std::size_t threads = 0;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::vector<std::string> header_lines(const Run& run, std::optional<std::uint64_t> seed) {
    std::vector<std::string> lines{"tool=kpa version=" KPA_VERSION, "command: " + run.command_line};
    if (seed) lines.push_back("rng=" + std::string(Rng::kName) + " seed=" + std::to_string(*seed));
    lines.push_back("created=" + utc_timestamp());
    return lines;
}

// Sorts (unless asked not to) and writes to --out or stdout.
void emit_array(const Run& run, PermArray a, std::optional<std::uint64_t> seed,
                const std::vector<std::string>& notes = {}) {
    if (!run.keep_order) a.sort_lex();
    auto lines = header_lines(run, seed);
    lines.insert(lines.end(), notes.begin(), notes.end());
    if (run.out_path.empty() || run.out_path == "-") {
        write_array(std::cout, a, lines);
        return;
    }
    std::ofstream out(run.out_path);
    if (!out) throw std::runtime_error("cannot write " + run.out_path);
    write_array(out, a, lines);
    std::cerr << "wrote " << a.size() << " permutations to " << run.out_path << '\n';
}

// "13@1,14@14": 1-based symbol at 1-based position.
std::vector<Pin> parse_pins(const std::string& text) {
    std::vector<Pin> pins;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw std::domain_error("pin '" + item + "' is not symbol@position");
        const auto sym = std::stoul(item.substr(0, at));
        const auto pos = std::stoul(item.substr(at + 1));
        if (sym == 0 || pos == 0) throw std::domain_error("pins are 1-based");
        pins.push_back({pos - 1, static_cast<Symbol>(sym - 1)});
    }
    return pins;
}

std::vector<int> parse_coefficients(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

struct SpaceArgs {
    std::string kind = "full";
    std::size_t n = 0;
    std::size_t m = 0;
    std::string pins;

    void add_to(CLI::App* app) {
        app->add_option("--space", kind, "full, s-nm or fixed")
            ->check(CLI::IsMember({"full", "s-nm", "fixed"}));
        app->add_option("--n", n, "number of symbols")->required();
        app->add_option("--m", m, "large symbols (s-nm)");
        app->add_option("--pins", pins, "fixed placements, 1-based symbol@position, comma separated");
    }

    SearchSpace build() const {
        if (kind == "full") return SearchSpace::full(n);
        if (kind == "s-nm") {
            if (m == 0) throw std::domain_error("--space s-nm needs --m");
            return SearchSpace::restricted_sorted(n, m);
        }
        if (pins.empty()) throw std::domain_error("--space fixed needs --pins");
        return SearchSpace::fixed_positions(n, parse_pins(pins));
    }
};

int cmd_dist(const std::string& a, const std::string& b) {
    const auto p = parse_permutation(a);
    const auto q = parse_permutation(b);
    if (p.size() != q.size()) throw std::domain_error("permutations have different lengths");
    std::cout << kendall_distance(p, q) << '\n';
    return kOk;
}

int cmd_verify(const std::string& path, std::optional<std::size_t> d, std::optional<std::size_t> m, bool allow_large) {
    ArrayHeader header;
    auto a = read_array_file(path, &header);
    if (m) a.set_restriction_m(m);
    VerifyOptions opts;
    opts.allow_large = allow_large;
    const auto need = d ? d : header.d;
    const auto report = need ? certify(a, *need, opts) : min_pairwise_distance(a, opts);
    std::cout << path << ": " << report << '\n';
    if (report.witness && (!report.passed || !need)) {
        const auto [i, j] = *report.witness;
        std::cout << "witness " << i << ": " << a[i].to_string() << '\n';
        std::cout << "witness " << j << ": " << a[j].to_string() << '\n';
    }
    if (need && !report.passed) return kCertFail;
    return kOk;
}

int cmd_expand(const Run& run, std::size_t n, const std::string& ops_text, const std::string& reps_path,
               const std::string& poly) {
    const auto ops = OpSet::parse(ops_text);
    std::optional<SymbolDomain> dom;
    if (!poly.empty()) {
        const auto [p, k] = SymbolDomain::prime_power(n);
        dom = SymbolDomain::field(p, k, parse_coefficients(poly));
    } else if (ops.scale_value) {
        const auto pk = SymbolDomain::prime_power(n);
        dom = pk.first != 0 ? SymbolDomain::field(n) : SymbolDomain::ring(n, true);
    } else {
        dom = SymbolDomain::ring(n);
    }
    ArrayHeader header;
    const auto reps = read_array_file(reps_path, &header);
    auto out = expand_orbits(*dom, reps, ops);
    const auto report = min_pairwise_distance(out);
    out.set_claimed_d(report.witness ? std::optional<std::size_t>(report.min_distance) : header.d);
    std::cerr << "expanded " << reps.size() << " representatives: " << report << '\n';
    emit_array(run, std::move(out), std::nullopt, {"domain=" + dom->describe() + " ops=" + ops.to_string()});
    if (header.d && report.witness && report.min_distance < *header.d) {
        std::cerr << "expansion falls short of the representatives' d=" << *header.d << '\n';
        return kCertFail;
    }
    return kOk;
}

int cmd_search(const Run& run, const SpaceArgs& space_args, std::size_t d, std::optional<std::size_t> seeds,
               std::size_t restarts, std::uint64_t rng_seed) {
    const auto space = space_args.build();
    RestartOptions opts;
    if (seeds) opts.seed_schedule = {*seeds};
    opts.workers = run.threads;
    auto a = best_of_restarts(space, d, restarts, rng_seed, opts);
    std::cerr << "found " << a.size() << " permutations at d=" << d << " in " << space.describe() << '\n';
    emit_array(run, std::move(a), rng_seed);
    return kOk;
}

int cmd_clique(const Run& run, const SpaceArgs& space_args, std::size_t d, std::uint64_t guard) {
    const auto space = space_args.build();
    CliqueOptions opts;
    opts.size_guard = guard;
    auto a = clique_exact(space, d, opts);
    std::cerr << "maximum clique " << a.size() << " at d=" << d << " in " << space.describe() << '\n';
    emit_array(run, std::move(a), std::nullopt);
    return kOk;
}

struct ConstructArgs {
    std::string rule;
    std::string in;
    std::string outer;
    std::vector<std::string> inner;
    std::size_t n = 0;
    std::size_t m = 0;
};

int cmd_construct(const Run& run, const ConstructArgs& c) {
    const auto need_in = [&]() {
        if (c.in.empty()) throw std::domain_error("--rule " + c.rule + " needs --in");
        return read_array_file(c.in);
    };
    const auto need_n = [&]() {
        if (c.n == 0) throw std::domain_error("--rule " + c.rule + " needs --n");
        return c.n;
    };
    PermArray out(1);
    if (c.rule == "halve") {
        out = halve_even(need_in());
    } else if (c.rule == "insert") {
        out = insert_symbol(need_in());
    } else if (c.rule == "compose" || c.rule == "compose-sum") {
        if (c.outer.empty() || c.inner.empty()) throw std::domain_error("--rule " + c.rule + " needs --outer and --inner");
        const auto outer = read_array_file(c.outer);
        if (c.rule == "compose") {
            if (c.inner.size() != 1) throw std::domain_error("--rule compose takes exactly one --inner");
            out = compose_arrays(outer, read_array_file(c.inner.front()));
        } else {
            if (!outer.restriction_m()) throw std::domain_error("outer array needs an m= header");
            std::vector<std::pair<Permutation, PermArray>> inners;
            for (const auto& path : c.inner) {
                auto inner = read_array_file(path);
                if (inner.size() == 0) throw std::domain_error(path + " is empty");
                // Each inner file belongs to the outer member whose placement it shares.
                const Permutation* owner = nullptr;
                for (const auto& tau : outer) {
                    if (SearchSpace::pinned_like(tau, *outer.restriction_m()).contains(inner[0])) owner = &tau;
                }
                if (owner == nullptr) throw std::domain_error(path + " matches no outer placement");
                inners.emplace_back(*owner, std::move(inner));
            }
            out = compose_sum(outer, inners);
        }
    } else if (c.rule == "prop8" || c.rule == "two-point") {
        if (c.m == 0) throw std::domain_error("--rule prop8 needs --m");
        out = two_point_array(need_n(), c.m);
    } else if (c.rule == "thm9a" || c.rule == "three") {
        out = three_array(need_n());
    } else if (c.rule == "thm9b" || c.rule == "five") {
        out = five_array(need_n());
    } else if (c.rule == "pattern-d3") {
        out = pattern_d3(need_n());
    } else if (c.rule == "pattern-d4") {
        out = pattern_d4(need_n());
    } else {
        throw std::domain_error("unknown rule " + c.rule);
    }
    std::cerr << c.rule << ": " << out.size() << " permutations";
    if (out.claimed_d()) std::cerr << " certified at d=" << *out.claimed_d();
    std::cerr << '\n';
    emit_array(run, std::move(out), std::nullopt);
    return kOk;
}

struct BoundsArgs {
    std::string in;
    std::string window;
    std::string table = "P-n-d";
    std::string range;
    std::vector<std::size_t> columns;
    std::size_t d = 0;
    bool csv = false;
    bool raw = false;
    std::string id;
    std::string formula = "wzyg";
    std::size_t n = 0;
    std::size_t t = 1;
    bool shrink = false;
};

// "4:20" or "4:20,1:30" for n and optionally d.
bounds::ComposeOptions parse_window(const std::string& text) {
    bounds::ComposeOptions opts;
    if (text.empty()) return opts;
    const auto range = [](const std::string& part, std::size_t& lo, std::size_t& hi) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw std::domain_error("window range '" + part + "' is not lo:hi");
        lo = std::stoul(part.substr(0, colon));
        hi = std::stoul(part.substr(colon + 1));
    };
    const auto comma = text.find(',');
    range(text.substr(0, comma), opts.window.n_min, opts.window.n_max);
    if (comma != std::string::npos) range(text.substr(comma + 1), opts.window.d_min, opts.window.d_max);
    return opts;
}

bounds::BoundsDb load_db(const BoundsArgs& b, bool derive) {
    auto db = bounds::read_db_file(b.in);
    if (!derive) return db;
    auto result = bounds::compose_bounds(db, parse_window(b.window));
    for (const auto& id : result.unresolved_recipes) std::cerr << "unresolved recipe " << id << '\n';
    return std::move(result.db);
}

int cmd_bounds_derive(const Run& run, const BoundsArgs& b) {
    const auto before = bounds::read_db_file(b.in);
    const auto result = bounds::compose_bounds(before, parse_window(b.window));
    std::cerr << "derived " << result.db.records().size() - before.records().size() << " records in "
              << result.rounds << " rounds\n";
    for (const auto& r : result.db.records()) {
        for (const auto& f : r.flags) {
            if (f.rfind("stated-mismatch", 0) == 0 || f.rfind("typo", 0) == 0) std::cerr << r.id << ": " << f << '\n';
        }
    }
    std::ostringstream out;
    out << "# tool=kpa version=" KPA_VERSION "\n# command: " << run.command_line << "\n# created=" << utc_timestamp()
        << '\n';
    bounds::write_db(out, result.db);
    if (run.out_path.empty() || run.out_path == "-") {
        std::cout << out.str();
    } else {
        std::ofstream f(run.out_path);
        if (!f) throw std::runtime_error("cannot write " + run.out_path);
        f << out.str();
    }
    return kOk;
}

int cmd_bounds_show(const BoundsArgs& b) {
    const auto db = load_db(b, !b.raw);
    bounds::TableSelector sel;
    if (b.table == "P-n-m-d") {
        if (b.d == 0) throw std::domain_error("--table P-n-m-d needs --d");
        sel.restricted = true;
        sel.fixed_d = b.d;
    } else if (b.table != "P-n-d") {
        throw std::domain_error("unknown table " + b.table + " (use P-n-d or P-n-m-d)");
    }
    if (!b.range.empty()) {
        const auto colon = b.range.find(':');
        sel.n_lo = std::stoul(b.range.substr(0, colon));
        sel.n_hi = colon == std::string::npos ? sel.n_lo : std::stoul(b.range.substr(colon + 1));
    }
    sel.columns = b.columns;
    const auto t = bounds::select_table(db, sel);
    if (t.empty()) {
        std::cerr << "no cells match the selection\n";
        return kOk;
    }
    std::cout << (b.csv ? bounds::render_csv(t) : bounds::render_text(t));
    return kOk;
}

int cmd_bounds_trace(const BoundsArgs& b) {
    const auto db = load_db(b, true);
    if (db.find(b.id) == nullptr) throw std::domain_error("no record with id " + b.id);
    for (const auto& line : bounds::trace(db, b.id)) std::cout << line << '\n';
    const bool ok = bounds::verify_trace(db, b.id);
    std::cout << "trace " << (ok ? "verified" : "FAILED re-evaluation") << '\n';
    return ok ? kOk : kCertFail;
}

int cmd_bounds_formula(const BoundsArgs& b) {
    if (b.n == 0) throw std::domain_error("--n is required");
    auto r = b.formula == "bm" ? bounds::formula_bound_bm(b.n, b.t) : bounds::formula_bound_wzyg(b.n, b.t);
    std::cout << r.cell.label() << " >= " << bounds::with_commas(r.value) << "  [" << r.rule << "]  m="
              << bounds::with_commas(bounds::detail::formula_m(b.n, b.t)) << '\n';
    if (b.shrink) {
        const auto s = bounds::formula_shrink(r);
        std::cout << s.cell.label() << " >= " << bounds::with_commas(s.value) << "  [" << s.rule << "]\n";
    }
    return kOk;
}

std::string join_args(int argc, char** argv) {
    std::string s = "kpa";
    for (int i = 1; i < argc; ++i) {
        s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permutation arrays under the Kendall-tau metric"};
    app.set_version_flag("--version", std::string("kpa ") + KPA_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    Run run;
    run.command_line = join_args(argc, argv);
    app.add_option("--threads", run.threads, "worker threads (default: KPA_THREADS or all cores)");

    const auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out,-o", run.out_path, "output file (default stdout)");
        sub->add_flag("--keep-order", run.keep_order, "do not sort members before writing");
    };

    std::string dist_a, dist_b;
    auto* dist = app.add_subcommand("dist", "Kendall-tau distance between two permutations");
    dist->add_option("p", dist_a, "first permutation, e.g. \"0 2 1\"")->required();
    dist->add_option("q", dist_b, "second permutation")->required();

    std::string verify_path;
    std::optional<std::size_t> verify_d, verify_m;
    bool allow_large = false;
    auto* verify = app.add_subcommand("verify", "certify an array file by full pairwise comparison");
    verify->add_option("file", verify_path)->required()->check(CLI::ExistingFile);
    verify->add_option("--d", verify_d, "required minimum distance (default: header d)");
    verify->add_option("--m", verify_m, "also require membership of S_{n,m}");
    verify->add_flag("--allow-large", allow_large, "lift the size guard");

    std::size_t expand_n = 0;
    std::string expand_ops = "ac", expand_reps, expand_poly;
    auto* expand = app.add_subcommand("expand", "expand representatives under affine automorphisms");
    expand->add_option("--n", expand_n)->required();
    expand->add_option("--ops", expand_ops, "any of a (scale), b (shift argument), c (shift value)");
    expand->add_option("--reps", expand_reps)->required()->check(CLI::ExistingFile);
    expand->add_option("--poly", expand_poly, "field polynomial coefficients, highest first, e.g. 1,1,0,1");
    add_output(expand);

    SpaceArgs search_space;
    std::size_t search_d = 0, restarts = 1;
    std::optional<std::size_t> search_seeds;
    std::uint64_t rng_seed = 0;
    auto* search = app.add_subcommand("search", "random greedy search with restarts");
    search_space.add_to(search);
    search->add_option("--d", search_d)->required();
    search->add_option("--seeds", search_seeds, "random seed count per restart (default: built-in schedule)");
    search->add_option("--restarts", restarts);
    search->add_option("--rng", rng_seed, "rng seed");
    add_output(search);

    SpaceArgs clique_space;
    std::size_t clique_d = 0;
    std::uint64_t clique_guard = CliqueOptions{}.size_guard;
    auto* clique = app.add_subcommand("clique", "exact maximum array over a small space");
    clique_space.add_to(clique);
    clique->add_option("--d", clique_d)->required();
    clique->add_option("--guard", clique_guard, "largest space accepted");
    add_output(clique);

    ConstructArgs cons;
    auto* construct = app.add_subcommand("construct", "constructions from known arrays or closed patterns");
    construct->add_option("--rule", cons.rule)
        ->required()
        ->check(CLI::IsMember(
            {"halve", "insert", "compose", "compose-sum", "prop8", "two-point", "thm9a", "three", "thm9b", "five",
             "pattern-d3", "pattern-d4"}));
    construct->add_option("--in", cons.in)->check(CLI::ExistingFile);
    construct->add_option("--outer", cons.outer)->check(CLI::ExistingFile);
    construct->add_option("--inner", cons.inner)->check(CLI::ExistingFile);
    construct->add_option("--n", cons.n);
    construct->add_option("--m", cons.m);
    add_output(construct);

    BoundsArgs b;
    auto* bounds_cmd = app.add_subcommand("bounds", "lower-bound database");
    bounds_cmd->require_subcommand(1);
    auto* derive = bounds_cmd->add_subcommand("derive", "evaluate derivations and close under the rules");
    derive->add_option("--in", b.in)->required()->check(CLI::ExistingFile);
    derive->add_option("--window", b.window, "n range, optionally d range: 4:20 or 4:20,1:40");
    derive->add_option("--out,-o", run.out_path);
    auto* show = bounds_cmd->add_subcommand("show", "print a table of best known bounds");
    show->add_option("--in", b.in)->required()->check(CLI::ExistingFile);
    show->add_option("--table", b.table, "P-n-d or P-n-m-d");
    show->add_option("--n", b.range, "row range lo:hi");
    show->add_option("--columns", b.columns, "d values (P-n-d) or m values (P-n-m-d)")->delimiter(',');
    show->add_option("--d", b.d, "fixed d for P-n-m-d");
    show->add_option("--window", b.window);
    show->add_flag("--csv", b.csv);
    show->add_flag("--raw", b.raw, "show stored records without deriving");
    auto* trace = bounds_cmd->add_subcommand("trace", "derivation tree of one record");
    trace->add_option("--in", b.in)->required()->check(CLI::ExistingFile);
    trace->add_option("--id", b.id)->required();
    trace->add_option("--window", b.window);
    auto* formula = bounds_cmd->add_subcommand("formula", "closed-form bound for n with n-2 a prime power");
    formula->add_option("--kind", b.formula)->check(CLI::IsMember({"wzyg", "bm"}));
    formula->add_option("--n", b.n)->required();
    formula->add_option("--t", b.t);
    formula->add_flag("--shrink", b.shrink, "also derive the n-1 bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (run.threads != 0) set_worker_count(run.threads);
        if (*dist) return cmd_dist(dist_a, dist_b);
        if (*verify) return cmd_verify(verify_path, verify_d, verify_m, allow_large);
        if (*expand) return cmd_expand(run, expand_n, expand_ops, expand_reps, expand_poly);
        if (*search) return cmd_search(run, search_space, search_d, search_seeds, restarts, rng_seed);
        if (*clique) return cmd_clique(run, clique_space, clique_d, clique_guard);
        if (*construct) return cmd_construct(run, cons);
        if (*derive) return cmd_bounds_derive(run, b);
        if (*show) return cmd_bounds_show(b);
        if (*trace) return cmd_bounds_trace(b);
        if (*formula) return cmd_bounds_formula(b);
    } catch (const std::exception& e) {
        std::cerr << "kpa: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
