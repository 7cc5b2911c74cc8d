#include <iostream>

#include "CLI11.hpp"
#include "fluidnet/harness.hpp"

using namespace fluidnet;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string seeds;
    std::string grid;
    int workers = 0;
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = load_config(c.config);
    if (!c.seeds.empty()) cfg.seeds = parse_seed_list(c.seeds);
    if (!c.grid.empty()) {
        cfg.grid = GridSpec::parse(c.grid);
        cfg.simulate.grid = cfg.grid.build();
    }
    if (c.workers > 0) cfg.workers = c.workers;
    if (!c.out.empty()) cfg.output_dir = c.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-node stochastic fluid network: simulation and tail bounds"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Common c;
    const auto common = [&](CLI::App* sub, bool config_required = true) {
        auto* opt = sub->add_option("--config", c.config, "YAML experiment file")->check(CLI::ExistingFile);
        if (config_required) opt->required();
        sub->add_option("--out", c.out, "output directory (overrides output.dir)");
        sub->add_option("--seeds", c.seeds, "seed list, e.g. 1-8 or 1,3,5");
        sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--grid", c.grid, "x grid as log:MIN:MAX:POINTS");
    };
    auto* derive_cmd = app.add_subcommand("derive", "print derived quantities and stability");
    common(derive_cmd);
    auto* sim_cmd = app.add_subcommand("simulate", "run the simulator and write statistics");
    common(sim_cmd);
    auto* cmp_cmd = app.add_subcommand("compare", "evaluate bounds against stored statistics");
    common(cmp_cmd);
    auto* oracle_cmd = app.add_subcommand("oracle", "fluid-model equivalence suite");
    common(oracle_cmd);
    app.add_subcommand("selfcheck", "distribution kernel diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("selfcheck")) return cmd_selfcheck(std::cout).passed() ? kExitPass : kExitStatistical;
        const ExperimentConfig cfg = load(c);
        if (*derive_cmd) return cmd_derive(cfg, std::cout, c.out.empty() ? std::nullopt : std::optional(c.out));
        if (*sim_cmd) {
            const RunManifest m = cmd_simulate(cfg, cfg.output_dir, std::cerr);
            return m.invariants_ok ? kExitPass : kExitInvariant;
        }
        if (*cmp_cmd) return cmd_compare(cfg, cfg.output_dir, std::cout).exit_code;
        if (*oracle_cmd) return cmd_oracle(cfg, std::cout).passed() ? kExitPass : kExitStatistical;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
