#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "fluidnet/harness.hpp"
#include "harness/report.hpp"
#include "json.hpp"

namespace fluidnet {

namespace fs = std::filesystem;
using report::num;

namespace {

DerivedQuantities derive_or_throw(const ExperimentConfig& cfg) {
    const DerivedQuantities d = derive(cfg.network);
    if (check_stability(d) == Stability::Unstable)
        throw ConfigError("parameters are unstable (rho_i >= 1 for some node); nothing to simulate");
    return d;
}

bool is_axis(Direction c) { return c.c1 == 0.0 || c.c2 == 0.0; }

std::string seed_file(std::uint64_t seed) { return "sim_seed" + std::to_string(seed) + ".csv"; }

}  // namespace

bool invariants_hold(const InvariantReport& inv, bool majorant_tracked, std::vector<std::string>* why) {
    bool ok = true;
    const auto note = [&](const std::string& s) {
        ok = false;
        if (why) why->push_back(s);
    };
    if (!(inv.max_reflection_residual < 1e-9))
        note("reflection residual " + num(inv.max_reflection_residual) + " >= 1e-9");
    if (!(inv.complementarity_mass <= 1e-9))
        note("regulator increased while the node was busy (mass " + num(inv.complementarity_mass) + ")");
    if (inv.min_content < 0.0) note("negative content " + num(inv.min_content));
    if (majorant_tracked && inv.dominance_violations > 0)
        note(std::to_string(inv.dominance_violations) + " majorant dominance violations");
    return ok;
}

int exit_code_for(const std::vector<Verdict>& verdicts) {
    int code = kExitPass;
    for (const auto& v : verdicts) {
        if (v.passed()) continue;
        if (v.invariant && v.status == VerdictStatus::Fail) return kExitInvariant;
        code = kExitStatistical;
    }
    return code;
}

int cmd_derive(const ExperimentConfig& cfg, std::ostream& out, const std::optional<std::string>& out_dir) {
    const DerivedQuantities d = derive(cfg.network);
    const Stability stab = check_stability(d);
    std::vector<std::pair<std::string, std::string>> rows;
    const auto add = [&](const std::string& k, double v) { rows.emplace_back(k, num(v)); };
    add("lambda", d.lambda);
    for (int i = 0; i < 2; ++i) {
        const std::string s = std::to_string(i + 1);
        add("m" + s, d.jump_mean[i]);
        add("delta" + s, d.drain[i]);
        add("alpha" + s, d.input_rate[i]);
        add("Delta" + s, d.net_drain[i]);
        add("rho" + s, d.load[i]);
        add("r" + s, d.r_upper[i]);
        add("r_prime" + s, d.r_lower[i]);
        add("boundary_mass" + s, d.boundary_mass(i));
    }
    rows.emplace_back("stability", to_string(stab));
    if (stab == Stability::StronglyStable) {
        for (const Direction& c : cfg.simulate.directions) {
            if (is_axis(c)) continue;
            const DirectionCoefficients dc = classify_direction(d, c);
            const std::string tag = "c=(" + num(c.c1) + ";" + num(c.c2) + ")";
            rows.emplace_back(tag + ".case", to_string(dc.kind));
            add(tag + ".r_c", dc.r);
            if (dc.r_lower) add(tag + ".r_prime_c", *dc.r_lower);
            add(tag + ".eta1", dc.eta[0]);
            add(tag + ".eta2", dc.eta[1]);
        }
    }
    std::ostringstream csv;
    csv << "key,value\n";
    for (const auto& [k, v] : rows) {
        out << k << " = " << v << '\n';
        csv << k << ',' << v << '\n';
    }
    if (out_dir) {
        fs::create_directories(*out_dir);
        report::write_text((fs::path(*out_dir) / "derive.csv").string(), csv.str());
    }
    return stab == Stability::Unstable ? kExitConfig : kExitPass;
}

RunManifest cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const DerivedQuantities d = derive_or_throw(cfg);
    if (cfg.simulate.track_majorant && check_stability(d) != Stability::StronglyStable)
        throw ConfigError("the majorant needs Delta_1 > 0 and Delta_2 > 0");
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    log << "simulating " << cfg.seeds.size() << " seed(s), horizon " << cfg.simulate.horizon << ", "
        << cfg.workers << " worker(s)\n";
    const std::vector<PathStats> runs = run_seeds(cfg.network, cfg.simulate, cfg.seeds, cfg.workers);

    RunManifest m;
    m.config_hash = cfg.hash();
    m.config_json = cfg.canonical_json();
    m.seeds = cfg.seeds;
    PathStats merged = runs.front();
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (k > 0) merged = merge(merged, runs[k]);
        const std::string name = seed_file(cfg.seeds[k]);
        report::write_text((dir / name).string(),
                           report::simulation_csv(runs[k], cfg.simulate.horizon, std::to_string(cfg.seeds[k])));
        m.seed_files.push_back(name);
    }
    std::string label;
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) label += (k ? ";" : "") + std::to_string(cfg.seeds[k]);
    m.merged_csv = "simulation.csv";
    report::write_text((dir / m.merged_csv).string(), report::simulation_csv(merged, cfg.simulate.horizon, label));
    m.stats_json = "stats.json";
    write_stats_json(merged, (dir / m.stats_json).string());

    m.invariants = merged.invariants();
    m.invariants_ok = invariants_hold(m.invariants, merged.majorant_tracked(), &m.invariant_failures);
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report::write_text((dir / "manifest.json").string(), manifest_json(m));
    log << "wrote " << (dir / m.merged_csv).string() << " (" << merged.batches().size() << " batches, "
        << m.invariants.epochs << " epochs, " << m.wall_clock_seconds << " s)\n";
    for (const auto& f : m.invariant_failures) log << "invariant violated: " << f << '\n';
    return m;
}

CompareResult cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const fs::path dir(out_dir);
    const auto manifest = nlohmann::json::parse(report::read_text((dir / "manifest.json").string()));
    if (manifest.at("config_hash").get<std::string>() != cfg.hash())
        throw ConfigError("statistics in '" + out_dir + "' were produced by a different configuration");
    const PathStats stats = read_stats_json((dir / "stats.json").string());
    const DerivedQuantities d = derive_or_throw(cfg);
    const bool strong = check_stability(d) == Stability::StronglyStable;
    const JumpModel& jumps = cfg.network.jumps();

    CompareResult res;
    auto& v = res.verdicts;
    v.push_back(check_reflection(stats.invariants()));
    if (stats.majorant_tracked())
        v.push_back(check_dominance(stats.invariants(), true, stats.seeds().size()));
    v.push_back(check_regulator_rates(stats, d));
    v.push_back(check_palm_identities(stats, d));

    BoundCheckOptions bo;
    bo.draws = cfg.analysis.geometric_draws;
    bo.seed = cfg.analysis.seed;
    std::vector<BoundReport> reports;
    if (stats.poisson()) {
        v.push_back(check_balance(stats, d, jumps));
        if (strong) {
            v.push_back(check_sandwich(stats, d, jumps, stats.directions(), bo, &reports));
            if (stats.majorant_tracked()) v.push_back(check_mg1_oracle(stats, d, jumps, bo));
        }
    }
    if (strong && jumps.is_mixture()) {
        if (!stats.poisson() && stats.direction_index(Direction(1.0, 0.0)))
            v.push_back(check_exact_trend(stats, d, jumps.mixture(), Direction(1.0, 0.0)));
        v.push_back(check_series_integral(d, jumps.mixture(), 1.0 / d.lambda, 50.0 * jumps.mixture().first.param1()));
    }

    // first-order bounds for the configured directions
    for (BoundMode mode : cfg.analysis.modes) {
        if (mode == BoundMode::GeomSumExact && stats.poisson() && strong) continue;  // already in reports
        BoundOptions opt;
        opt.mode = mode;
        opt.draws = bo.draws;
        opt.seed = bo.seed;
        opt.eta_reading = cfg.analysis.eta_reading;
        for (const Direction& c : stats.directions()) {
            if (is_axis(c)) {
                const int node = c.c1 == 0.0 ? 1 : 0;
                if (d.net_drain[node] > 0.0)
                    reports.push_back(theorem41_bounds(d, jumps.component(node), stats.grid(), opt, node));
            } else if (strong) {
                reports.push_back(theorem42_bounds(d, classify_direction(d, c), jumps, stats.grid(), opt));
            }
        }
    }
    report::write_text((dir / "bounds.csv").string(), report::bounds_csv(reports));
    report::write_text((dir / "verdicts.csv").string(), report::verdicts_csv(v));
    for (const auto& x : v) log << x.line() << '\n';
    res.exit_code = exit_code_for(v);
    return res;
}

Verdict cmd_oracle(const ExperimentConfig& cfg, std::ostream& out) {
    const DerivedQuantities d = derive(cfg.network);
    if (check_stability(d) != Stability::StronglyStable)
        throw ConfigError("the fluid oracle needs Delta_1 > 0 and Delta_2 > 0");
    const Verdict v = check_fluid_oracle(d);
    out << v.line() << '\n';
    return v;
}

Verdict cmd_selfcheck(std::ostream& out) {
    const Verdict v = check_distribution_kernel();
    out << v.line() << '\n';
    return v;
}

}  // namespace fluidnet
