#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluidnet/asymptotics.hpp"
#include "fluidnet/network.hpp"
#include "fluidnet/simulator.hpp"
#include "fluidnet/verdicts.hpp"

namespace fluidnet {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Invalid or unreadable experiment configuration. `line` is 1-based when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

enum ExitCode : int { kExitPass = 0, kExitInvariant = 2, kExitStatistical = 3, kExitConfig = 4 };

struct GridSpec {
    std::string kind = "log";
    double min = 0.5;
    double max = 2000.0;
    std::size_t points = 30;

    std::vector<double> build() const;
    /// "log:MIN:MAX:POINTS" or "linear:MIN:MAX:POINTS"
    static GridSpec parse(const std::string& text);
};

struct AnalysisConfig {
    std::size_t geometric_draws = 1'000'000;
    std::uint64_t seed = 7;
    EtaReading eta_reading = EtaReading::Printed;
    std::vector<BoundMode> modes{BoundMode::GeomSumExact, BoundMode::GeomSumAsymptotic};
};

struct ExperimentConfig {
    explicit ExperimentConfig(NetworkParams net) : network(std::move(net)) {}

    int schema_version = kSchemaVersion;
    NetworkParams network;
    SimulationOptions simulate;
    GridSpec grid;
    std::vector<std::uint64_t> seeds;
    int workers = 1;
    AnalysisConfig analysis;
    std::string output_dir = "out";
    std::string source = "<string>";

    /// Canonical JSON of every parsed value, keys sorted.
    std::string canonical_json() const;
    /// SHA-256 hex digest of canonical_json().
    std::string hash() const;
};

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

/// "1-8", "1,3,5" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

struct RunManifest {
    std::string config_hash;
    std::string tool_version = kToolVersion;
    std::string config_json;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> seed_files;
    std::string merged_csv;
    std::string stats_json;
    double wall_clock_seconds = 0.0;
    InvariantReport invariants;
    bool invariants_ok = false;
    std::vector<std::string> invariant_failures;
};

/// Pathwise invariant gate: reflection residual, complementarity, nonnegativity
/// and (when tracked) majorant dominance. Failures are appended to `why`.
bool invariants_hold(const InvariantReport& inv, bool majorant_tracked, std::vector<std::string>* why = nullptr);

/// Prints derived quantities, stability and direction coefficients; writes derive.csv to out_dir when given.
int cmd_derive(const ExperimentConfig& cfg, std::ostream& out, const std::optional<std::string>& out_dir = {});

/// Runs every seed, writes per-seed and merged CSVs, stats.json and manifest.json.
RunManifest cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

struct CompareResult {
    std::vector<Verdict> verdicts;
    int exit_code = kExitPass;
};

/// Joins the stored statistics with the analytic bounds and emits verdicts.csv and bounds.csv.
CompareResult cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Fluid-oracle equivalence suite on the configured network.
Verdict cmd_oracle(const ExperimentConfig& cfg, std::ostream& out);

/// Distribution-kernel diagnostics.
Verdict cmd_selfcheck(std::ostream& out);

/// Serialisation of merged statistics (batch level, round-trip exact).
void write_stats_json(const PathStats& stats, const std::string& path);
PathStats read_stats_json(const std::string& path);

/// Manifest as JSON text. `with_timing` false drops the wall-clock field.
std::string manifest_json(const RunManifest& m, bool with_timing = true);

/// Exit code for a set of verdicts: 2 if a pathwise invariant failed, 3 if any other failed.
int exit_code_for(const std::vector<Verdict>& verdicts);

}  // namespace fluidnet
