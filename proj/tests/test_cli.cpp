#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kpa/io.hpp"
#include "kpa/verifier.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(KPA_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& rel) { return kpa::test::data_path(rel); }

// Drops the creation-time header line, the only field allowed to differ.
std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("# created=", 0) != 0) out += line + "\n";
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "kpa_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, Distance) {
    const auto r = run("dist \"0 2 1\" \"0 1 2\"");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1\n");
    EXPECT_EQ(run("dist \"1 2 3 4\" \"4 3 2 1\"").out, "6\n");
}

TEST(Cli, VerifyGolden) {
    const auto golden = data("golden/p6d3.txt");
    EXPECT_EQ(run("verify " + golden + " --d 3").code, 0);
    const auto fail = run("verify " + golden + " --d 4");
    EXPECT_EQ(fail.code, 2);
    EXPECT_NE(fail.out.find("result=FAIL"), std::string::npos);
    EXPECT_NE(fail.out.find("witness"), std::string::npos);
    // Header d is used when --d is absent.
    EXPECT_EQ(run("verify " + golden).code, 0);
}

TEST(Cli, GoldenIsReproducible) {
    // The golden file was written by this exact command line.
    const auto out = scratch("p6d3.txt");
    const auto cwd = fs::current_path();
    fs::current_path(fs::path(KPA_DATA_DIR).parent_path());
    const auto r = run("expand --n 6 --ops c --reps data/reps/n6_d3.txt -o " + out.string());
    fs::current_path(cwd);
    ASSERT_EQ(r.code, 0);
    auto fresh = without_timestamp(slurp(out.string()));
    auto golden = without_timestamp(slurp(data("golden/p6d3.txt")));
    // Only the output path in the recorded command differs.
    const auto strip_cmd = [](std::string s) {
        const auto at = s.find("# command: ");
        return s.erase(at, s.find('\n', at) - at);
    };
    EXPECT_EQ(strip_cmd(fresh), strip_cmd(golden));
    const auto a = kpa::read_array_file(out.string());
    EXPECT_EQ(a.size(), 102U);
    EXPECT_TRUE(kpa::certify(a, 3).passed);
}

TEST(Cli, SearchIsDeterministicAndRecordsSeed) {
    const std::string args = "search --space full --n 6 --d 5 --restarts 8 --rng 42 --threads 2";
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(without_timestamp(a.out), without_timestamp(b.out));
    EXPECT_NE(a.out.find("rng=mt19937_64 seed=42"), std::string::npos);
    EXPECT_NE(a.out.find("# tool=kpa version="), std::string::npos);
    EXPECT_NE(a.out.find("# command: kpa " + args), std::string::npos);
    EXPECT_NE(a.out.find("# created="), std::string::npos);
    const auto arr = kpa::parse_array(a.out);
    EXPECT_TRUE(kpa::certify(arr, 5).passed);
    EXPECT_TRUE(std::is_sorted(arr.begin(), arr.end()));
    // The thread count does not change the result.
    const auto c = run("search --space full --n 6 --d 5 --restarts 8 --rng 42 --threads 1");
    EXPECT_EQ(kpa::parse_array(c.out).members(), arr.members());
}

TEST(Cli, KeepOrder) {
    const auto kept = kpa::parse_array(run("search --space s-nm --n 8 --m 3 --d 6 --rng 3 --keep-order").out);
    const auto sorted = kpa::parse_array(run("search --space s-nm --n 8 --m 3 --d 6 --rng 3").out);
    ASSERT_EQ(kept.size(), sorted.size());
    auto resorted = kept;
    resorted.sort_lex();
    EXPECT_EQ(resorted.members(), sorted.members());
    EXPECT_EQ(*sorted.restriction_m(), 3U);
}

TEST(Cli, FixedSpaceSearch) {
    const auto r = run("search --space fixed --n 9 --pins 9@1,8@9 --d 4 --restarts 4 --rng 1");
    ASSERT_EQ(r.code, 0);
    const auto a = kpa::parse_array(r.out);
    for (const auto& p : a) {
        EXPECT_EQ(p[0], 8);
        EXPECT_EQ(p[8], 7);
    }
}

TEST(Cli, Clique) {
    const auto r = run("clique --space s-nm --n 5 --m 2 --d 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(kpa::parse_array(r.out).size(), 6U);
    EXPECT_EQ(run("clique --space full --n 8 --d 3").code, 1);  // above the guard
}

TEST(Cli, Constructions) {
    const auto p3 = scratch("p10d3.txt");
    ASSERT_EQ(run("construct --rule pattern-d3 --n 10 -o " + p3.string()).code, 0);
    EXPECT_EQ(kpa::read_array_file(p3.string()).size(), 18U);
    const auto ins = run("construct --rule insert --in " + p3.string());
    ASSERT_EQ(ins.code, 0);
    EXPECT_EQ(kpa::parse_array(ins.out).size(), 18U * 4);  // ceil(11/3)
    const auto halved = run("construct --rule halve --in " + p3.string());
    ASSERT_EQ(halved.code, 0);
    EXPECT_TRUE(kpa::certify(kpa::parse_array(halved.out), 4).passed);

    const auto inner = scratch("n3d3.txt");
    ASSERT_EQ(run("clique --space full --n 3 --d 3 -o " + inner.string()).code, 0);
    const auto comp = run("construct --rule compose --outer " + data("arrays/p5_2_3.txt") + " --inner " + inner.string());
    ASSERT_EQ(comp.code, 0);
    const auto composed = kpa::parse_array(comp.out);
    EXPECT_EQ(composed.size(), 12U);
    EXPECT_TRUE(kpa::certify(composed, 3).passed);

    EXPECT_EQ(kpa::parse_array(run("construct --rule thm9a --n 12").out).size(), 3U);
    EXPECT_EQ(kpa::parse_array(run("construct --rule thm9b --n 13").out).size(), 5U);
    EXPECT_EQ(kpa::parse_array(run("construct --rule prop8 --n 7 --m 3").out).size(), 2U);
    EXPECT_EQ(kpa::parse_array(run("construct --rule pattern-d4 --n 9").out).size(), 10U);
    EXPECT_EQ(kpa::parse_array(run("construct --rule five --n 13").out).members(),
              kpa::parse_array(run("construct --rule thm9b --n 13").out).members());
    EXPECT_EQ(run("construct --rule halve").code, 1);
}

TEST(Cli, ComposeSumMatchesPlacements) {
    const auto outer = scratch("outer.txt");
    {
        std::ofstream f(outer);
        f << "# n=5 d=3 m=2\n5 4 1 2 3\n1 2 3 4 5\n";
    }
    // One inner (5,3)-array per outer placement.
    const auto a = scratch("inner_a.txt");
    const auto b = scratch("inner_b.txt");
    {
        std::ofstream fa(a), fb(b);
        fa << "# n=5 d=3\n5 4 1 2 3\n5 4 3 2 1\n";
        fb << "# n=5 d=3\n1 2 3 4 5\n3 2 1 4 5\n";
    }
    const auto r = run("construct --rule compose-sum --outer " + outer.string() + " --inner " + a.string() +
                       " --inner " + b.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(kpa::parse_array(r.out).size(), 4U);
}

TEST(Cli, Bounds) {
    const auto db = data("bounds/published.jsonl");
    const auto trace = run("bounds trace --in " + db + " --id ledger-n14-d11");
    EXPECT_EQ(trace.code, 0);
    EXPECT_NE(trace.out.find("P(14,11) >= 141,782"), std::string::npos);
    EXPECT_NE(trace.out.find("trace verified"), std::string::npos);
    const auto show = run("bounds show --in " + db + " --n 14:14 --columns 11");
    EXPECT_NE(show.out.find("141,782"), std::string::npos);
    const auto csv = run("bounds show --in " + db + " --table P-n-m-d --d 13 --n 16:16 --columns 4 --csv");
    EXPECT_NE(csv.out.find("16,44"), std::string::npos);
    const auto formula = run("bounds formula --n 15 --t 5 --shrink");
    EXPECT_NE(formula.out.find("19,703"), std::string::npos);
    EXPECT_NE(run("bounds formula --n 11 --t 1").out.find("1,330,560"), std::string::npos);

    const auto derived = scratch("derived.jsonl");
    ASSERT_EQ(run("bounds derive --in " + db + " --window 4:20 -o " + derived.string()).code, 0);
    const auto reread = run("bounds show --raw --in " + derived.string() + " --n 16:16 --columns 12");
    EXPECT_NE(reread.out.find("1,049,634"), std::string::npos);
    EXPECT_EQ(run("bounds trace --in " + db + " --id no-such-id").code, 1);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("verify /no/such/file --d 3").code, 1);
    EXPECT_EQ(run("search --n 5").code, 1);
    EXPECT_EQ(run("search --n 5 --d 3 --bogus").code, 1);
    EXPECT_EQ(run("search --space s-nm --n 5 --d 3").code, 1);
    EXPECT_EQ(run("dist \"0 1\" \"0 1 2\"").code, 1);
    EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, ThreadsFromEnvironment) {
    const std::string cmd = "KPA_THREADS=1 " + std::string(KPA_CLI) + " verify " + data("golden/p6d3.txt") +
                            " --d 3 >/dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
}
