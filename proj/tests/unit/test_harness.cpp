#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fluidnet/harness.hpp"

using namespace fluidnet;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(schema_version: 1
network:
  mu1: 2.0
  mu2: 2.0
  p12: 0.5
  p21: 0.5
  arrival: {type: poisson, rate: 1.0}
  jumps:
    type: mixture
    p1: 0.5
    dist1: {type: exponential, rate: 1.0}
    dist2: {type: exponential, rate: 1.0}
simulate:
  horizon: 20000
  seeds: 1-2
  batches: 10
  majorant: true
  grid: {kind: log, min: 0.2, max: 20, points: 8}
  directions: [[1, 0], [0.5, 0.5]]
  thetas: [[-0.5, -0.5]]
analysis:
  geometric_draws: 20000
)";

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("fluidnet_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int error_line(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(kSmall);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(cfg.simulate.grid.size() == 8);
    CHECK(cfg.simulate.directions.size() == 2);
    CHECK(cfg.simulate.track_majorant);
    CHECK(cfg.analysis.geometric_draws == 20000);
    CHECK(cfg.network.jumps().is_mixture());
    CHECK(cfg.hash().size() == 64);
    CHECK(parse_config(kSmall).hash() == cfg.hash());
    std::string other = kSmall;
    other.replace(other.find("horizon: 20000"), 14, "horizon: 20001");
    CHECK(parse_config(other).hash() != cfg.hash());
}

TEST_CASE("config errors carry line numbers") {
    std::string bad = kSmall;
    bad.replace(bad.find("mu2: 2.0"), 8, "mu2: two");
    CHECK(error_line(bad) == 4);
    bad = kSmall;
    bad.replace(bad.find("majorant"), 8, "majorent");
    CHECK(error_line(bad) == 17);
    bad = kSmall;
    bad.replace(bad.find("schema_version: 1"), 17, "schema_version: 9");
    CHECK(error_line(bad) == 1);
    CHECK_THROWS_AS(parse_config("network: [1, 2"), ConfigError);
    bad = kSmall;
    bad.replace(bad.find("exponential"), 11, "cauchy");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("seed lists and grids") {
    CHECK(parse_seed_list("1-3,7") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("1,1"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("x"), ConfigError);
    const auto g = GridSpec::parse("log:0.5:2000:30");
    CHECK(g.build().size() == 30);
    CHECK_THROWS_AS(GridSpec::parse("log:0:1:3"), ConfigError);
    CHECK_THROWS_AS(GridSpec::parse("log:1:2"), ConfigError);
}

TEST_CASE("exit codes") {
    Verdict ok;
    ok.status = VerdictStatus::Pass;
    Verdict stat = ok;
    stat.status = VerdictStatus::Fail;
    Verdict inv = stat;
    inv.invariant = true;
    Verdict thin = ok;
    thin.status = VerdictStatus::Insufficient;
    CHECK(exit_code_for({ok}) == kExitPass);
    CHECK(exit_code_for({ok, stat}) == kExitStatistical);
    CHECK(exit_code_for({stat, inv}) == kExitInvariant);
    CHECK(exit_code_for({thin}) == kExitStatistical);
}

TEST_CASE("unstable configurations are refused") {
    std::string text = kSmall;
    text.replace(text.find("rate: 1.0}\n  jumps"), 9, "rate: 3.9");
    const auto cfg = parse_config(text);
    std::ostringstream out;
    CHECK(cmd_derive(cfg, out) == kExitConfig);
    CHECK(out.str().find("stability = unstable") != std::string::npos);
    CHECK_THROWS_AS(cmd_simulate(cfg, scratch("unstable").string(), out), ConfigError);
}

TEST_CASE("insufficient resolution is not a pass") {
    const auto cfg = parse_config(kSmall);
    auto opt = cfg.simulate;
    opt.horizon = 200.0;
    opt.grid = log_grid(1e3, 1e4, 4);  // far beyond anything a short run reaches
    const auto stats = run(cfg.network, opt, 1);
    const auto d = derive(cfg.network);
    const auto v = check_exact_trend(stats, d, cfg.network.jumps().mixture(), Direction(1.0, 0.0));
    CHECK(v.status == VerdictStatus::Insufficient);
    CHECK_FALSE(v.passed());
}

TEST_CASE("simulate, compare and determinism") {
    const auto cfg = parse_config(kSmall);
    const auto a = scratch("a"), b = scratch("b");
    std::ostringstream log;
    const auto m = cmd_simulate(cfg, a.string(), log);
    CHECK(m.invariants_ok);
    CHECK(m.seed_files == std::vector<std::string>{"sim_seed1.csv", "sim_seed2.csv"});
    CHECK(fs::exists(a / "simulation.csv"));
    CHECK(manifest_json(m, false).find("wall_clock") == std::string::npos);
    CHECK(manifest_json(m, true).find("wall_clock_seconds") != std::string::npos);

    // statistics survive the JSON round trip bit for bit
    const auto stats = read_stats_json((a / "stats.json").string());
    const auto direct = run_replications(cfg.network, cfg.simulate, cfg.seeds);
    for (std::size_t k = 0; k < stats.grid().size(); ++k) {
        CHECK(stats.tail(1, k).value == direct.tail(1, k).value);
        CHECK(stats.tail(1, k).halfwidth == direct.tail(1, k).halfwidth);
    }
    write_stats_json(stats, (a / "again.json").string());
    CHECK(slurp(a / "again.json") == slurp(a / "stats.json"));
    fs::remove(a / "again.json");

    const auto r = cmd_compare(cfg, a.string(), log);
    CHECK(r.exit_code == exit_code_for(r.verdicts));
    CHECK(fs::exists(a / "bounds.csv"));
    CHECK(fs::exists(a / "verdicts.csv"));
    bool has_sandwich = false;
    for (const auto& v : r.verdicts) has_sandwich |= v.criterion == 6;
    CHECK(has_sandwich);

    cmd_simulate(cfg, b.string(), log);
    cmd_compare(cfg, b.string(), log);
    for (const char* f : {"sim_seed1.csv", "sim_seed2.csv", "simulation.csv", "stats.json", "bounds.csv",
                          "verdicts.csv"})
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);

    // a different configuration cannot be compared against these statistics
    std::string other = kSmall;
    other.replace(other.find("horizon: 20000"), 14, "horizon: 30000");
    CHECK_THROWS_AS(cmd_compare(parse_config(other), a.string(), log), ConfigError);
}

TEST_CASE("simulation CSV layout") {
    const auto cfg = parse_config(kSmall);
    const auto dir = scratch("csv");
    std::ostringstream log;
    cmd_simulate(cfg, dir.string(), log);
    std::ifstream in(dir / "sim_seed1.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "direction_c1,x,tail_estimate,ci_halfwidth");
    int rows = 0;
    while (std::getline(in, line) && !line.empty()) ++rows;
    CHECK(rows == 16);
    std::getline(in, line);
    CHECK(line == "key,value");
    std::getline(in, line);
    CHECK(line.rfind("y_rate1,", 0) == 0);
}
