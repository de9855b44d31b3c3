#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "a2g/cli.hpp"
#include "a2g/errors.hpp"
#include "a2g/selftest.hpp"

using namespace a2g;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "a2g");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

fs::path scratch(const char* name) {
    const fs::path p = fs::temp_directory_path() / "a2g_cli_test" / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("run writes the result files") {
    const auto dir = scratch("run");
    const auto r = cli({"run", "-o", dir.string(), "experiment.rounds=4", "data.synth_samples=400"});
    REQUIRE(r.code == kExitOk);
    const std::string rounds = slurp(dir / "rounds.csv");
    CHECK(count_lines(rounds) == 5);
    CHECK(rounds.find(",w_5\n") != std::string::npos);
    CHECK(count_lines(slurp(dir / "summary.csv")) == 2);
    CHECK(slurp(dir / "summary.json").find("config_digest") != std::string::npos);
    CHECK(slurp(dir / "config.resolved").find("experiment.rounds = 4\n") != std::string::npos);

    // Re-running from the echoed config reproduces the rounds byte for byte,
    // from a different working directory.
    const auto again = scratch("run_again");
    const auto cwd = fs::current_path();
    fs::create_directories(again);
    fs::current_path(again);
    const auto r2 = cli({"run", "-c", (dir / "config.resolved").string(), "-o", "out"});
    fs::current_path(cwd);
    REQUIRE(r2.code == kExitOk);
    CHECK(slurp(again / "out" / "rounds.csv") == rounds);
}

TEST_CASE("sweep writes one summary line per value in order") {
    const auto dir = scratch("sweep");
    const auto r = cli({"sweep", "-o", dir.string(), "--axis", "beta", "--values", "0.05,0.1,0.3,0.5,1.0",
                        "experiment.rounds=3", "data.synth_samples=400"});
    REQUIRE(r.code == kExitOk);
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(count_lines(summary) == 6);
    const auto p1 = summary.find(",0.05,");
    const auto p2 = summary.find(",0.1,");
    const auto p3 = summary.find(",1.0,");
    CHECK(p1 < p2);
    CHECK(p2 < p3);
    CHECK(count_lines(slurp(dir / "rounds.csv")) == 16);
}

TEST_CASE("exit codes") {
    CHECK(cli({"run", "-o", scratch("bad").string(), "aggregation.beta=1.5"}).code == kExitConfig);
    const auto unknown = cli({"run", "-o", scratch("bad").string(), "aggregation.bogus=1"});
    CHECK(unknown.code == kExitConfig);
    CHECK(unknown.err.find("aggregation.bogus") != std::string::npos);
    CHECK(cli({"frobnicate"}).code == kExitConfig);
    CHECK(cli({"run", "-c", "/nonexistent.cfg"}).code == kExitConfig);
    CHECK(cli({"sweep", "-o", scratch("bad").string(), "--axis", "beta"}).code == kExitConfig);
    CHECK(cli({"run", "-o", scratch("bad").string(), "data.source=csv", "data.csv_path=/nonexistent.csv"}).code ==
          kExitRuntime);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("partition report") {
    const auto r = cli({"partition-report", "partition.scheme=label_skew", "data.synth_samples=500"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("client,size,label0,label1\n", 0) == 0);
    CHECK(count_lines(r.out) == 7);
}

TEST_CASE("selftest") {
    const auto r = cli({"selftest"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("PASS qos") != std::string::npos);
}

TEST_CASE("selftest catches a corrupted weight function") {
    SelftestHooks broken;
    broken.weights = [](std::span<const QosSample> s, std::span<const std::size_t> n, const QosGains& g) {
        auto w = trust_weights(s, n, g);
        for (auto& x : w.weights) x *= 1.01;  // no longer normalized
        return w;
    };
    std::ostringstream out;
    CHECK_FALSE(run_selftest(out, broken));
    CHECK(out.str().find("FAIL qos") != std::string::npos);
    CHECK(out.str().find("PASS manifold") != std::string::npos);

    SelftestHooks swapped;
    swapped.weights = [](std::span<const QosSample> s, std::span<const std::size_t> n, const QosGains& g) {
        auto w = trust_weights(s, n, g);
        if (w.weights.size() > 1) std::swap(w.weights.front(), w.weights.back());
        return w;
    };
    std::ostringstream out2;
    CHECK_FALSE(run_selftest(out2, swapped));
    CHECK(out2.str().find("FAIL qos") != std::string::npos);
}

TEST_CASE("thread count parsing") {
    CHECK_FALSE(parse_thread_count(nullptr).has_value());
    CHECK_FALSE(parse_thread_count("").has_value());
    CHECK(parse_thread_count("4") == 4u);
    CHECK_THROWS_AS(parse_thread_count("0"), ConfigError);
    CHECK_THROWS_AS(parse_thread_count("four"), ConfigError);
}
