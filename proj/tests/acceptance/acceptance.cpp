// End-to-end acceptance run: one PASS/FAIL line per criterion.
//
// The reference pipeline (simulate + compare) runs twice into separate
// directories; the first run feeds criteria 1-7 and 10, the pair feeds 12.
// Criterion 8 uses the same network under deterministic arrivals.

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fluidnet/harness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fluidnet;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Byte comparison of two output trees; the manifest is compared without its wall-clock field.
bool same_outputs(const fs::path& a, const fs::path& b, std::string& detail) {
    std::set<std::string> names;
    for (const auto& dir : {a, b})
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file()) names.insert(e.path().filename().string());
    std::size_t compared = 0;
    for (const auto& n : names) {
        if (!fs::exists(a / n) || !fs::exists(b / n)) {
            detail = n + " missing in one run";
            return false;
        }
        std::string x = slurp(a / n), y = slurp(b / n);
        if (n == "manifest.json") {
            auto jx = nlohmann::json::parse(x), jy = nlohmann::json::parse(y);
            jx.erase("wall_clock_seconds");
            jy.erase("wall_clock_seconds");
            x = jx.dump();
            y = jy.dump();
        }
        if (x != y) {
            detail = n + " differs";
            return false;
        }
        ++compared;
    }
    detail = std::to_string(compared) + " files compared";
    return compared > 0;
}

ExperimentConfig config(const std::string& name, double horizon_scale) {
    ExperimentConfig cfg = load_config(std::string(FLUIDNET_SOURCE_DIR) + "/configs/" + name);
    cfg.simulate.horizon *= horizon_scale;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_runs";
    std::vector<int> allowed;
    double scale = 1.0;
    app.add_option("--out", out, "scratch directory");
    app.add_option("--allow-fail", allowed, "criteria whose failure is documented and does not fail the run");
    app.add_option("--horizon-scale", scale, "multiply configured horizons (development only)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::map<int, Verdict> verdicts;
    std::ostringstream log;
    try {
        const fs::path root(out);
        fs::remove_all(root);

        const ExperimentConfig ref = config("reference.yaml", scale);
        const auto run_pipeline = [&](const fs::path& dir) {
            cmd_simulate(ref, dir.string(), log);
            return cmd_compare(ref, dir.string(), log);
        };
        const CompareResult first = run_pipeline(root / "reference_a");
        for (const auto& v : first.verdicts) verdicts[v.criterion] = v;
        run_pipeline(root / "reference_b");
        std::string detail;
        const bool same = same_outputs(root / "reference_a", root / "reference_b", detail);
        verdicts[12] = check_determinism(same, detail);

        const ExperimentConfig renewal = config("renewal.yaml", scale);
        cmd_simulate(renewal, (root / "renewal").string(), log);
        for (const auto& v : cmd_compare(renewal, (root / "renewal").string(), log).verdicts)
            if (v.criterion == 8) verdicts[8] = v;

        verdicts[9] = cmd_oracle(ref, log);
        verdicts[11] = cmd_selfcheck(log);
    } catch (const std::exception& e) {
        std::cerr << "acceptance run aborted: " << e.what() << '\n' << log.str();
        return 1;
    }

    int failures = 0;
    for (int c = 1; c <= 12; ++c) {
        const auto it = verdicts.find(c);
        if (it == verdicts.end()) {
            std::cout << "[FAIL] criterion " << c << ": not evaluated\n";
            ++failures;
            continue;
        }
        const bool known = std::find(allowed.begin(), allowed.end(), c) != allowed.end();
        std::cout << it->second.line();
        if (!it->second.passed() && known) std::cout << " (documented, not gating)";
        std::cout << '\n';
        if (!it->second.passed() && !known) ++failures;
    }
    std::cout << (failures ? "acceptance: FAILED" : "acceptance: ok") << " (" << failures << " gating failures)\n";
    return failures ? 1 : 0;
}
