#include "harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fluidnet {

using nlohmann::json;

namespace report {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string simulation_csv(const PathStats& stats, double horizon, const std::string& seed_label) {
    std::ostringstream os;
    os << "direction_c1,x,tail_estimate,ci_halfwidth\n";
    for (std::size_t dir = 0; dir < stats.directions().size(); ++dir)
        for (std::size_t k = 0; k < stats.grid().size(); ++k) {
            const Estimate e = stats.tail(dir, k);
            os << num(stats.directions()[dir].c1) << ',' << num(stats.grid()[k]) << ',' << num(e.value) << ','
               << num(e.halfwidth) << '\n';
        }
    os << "\nkey,value\n";
    os << "y_rate1," << num(stats.regulator_rate(0).value) << '\n';
    os << "y_rate2," << num(stats.regulator_rate(1).value) << '\n';
    os << "empty_fraction," << num(stats.empty_fraction().value) << '\n';
    os << "horizon," << num(horizon) << '\n';
    os << "seed," << seed_label << '\n';
    return os.str();
}

std::string bounds_csv(const std::vector<BoundReport>& reports) {
    std::ostringstream os;
    os << "x,lower,upper,mode,case,direction,lower_se,upper_se,clamped,bound\n";
    for (const auto& r : reports) {
        const bool single = r.c.c1 == 0.0 || r.c.c2 == 0.0;
        const std::string label = single ? "single_node" : "two_dim/" + to_string(r.eta_reading);
        for (std::size_t k = 0; k < r.grid.size(); ++k) {
            os << num(r.grid[k]) << ',' << num(r.lower[k]) << ',' << num(r.upper[k]) << ','
               << to_string(r.upper_kind) << ',' << (single ? "-" : to_string(r.kind)) << ",\"(" << num(r.c.c1)
               << ";" << num(r.c.c2) << ")\"," << num(r.lower_se[k]) << ',' << num(r.upper_se[k]) << ','
               << (r.lower_clamped[k] || r.upper_clamped[k] ? 1 : 0) << ',' << label << '\n';
        }
    }
    return os.str();
}

std::string verdicts_csv(const std::vector<Verdict>& verdicts) {
    const auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "criterion,name,status,invariant,measured,detail\n";
    for (const auto& v : verdicts)
        os << v.criterion << ',' << quote(v.name) << ',' << to_string(v.status) << ',' << (v.invariant ? 1 : 0)
           << ',' << quote(v.measured) << ',' << quote(v.detail) << '\n';
    return os.str();
}

}  // namespace report

namespace {

json batch_json(const BatchTotals& b) {
    json j;
    j["seed"] = b.seed;
    j["index"] = b.index;
    j["duration"] = b.duration;
    j["tail_time"] = b.tail_time;
    j["regulator"] = b.regulator;
    j["empty_time"] = b.empty_time;
    j["palm_atom"] = b.palm_atom;
    j["palm_tail"] = b.palm_tail;
    j["boundary_joint"] = b.boundary_joint;
    j["mgf"] = b.mgf;
    j["palm_mgf"] = b.palm_mgf;
    j["boundary_mgf"] = b.boundary_mgf;
    j["majorant_tail"] = b.majorant_tail;
    return j;
}

BatchTotals batch_from(const json& j) {
    BatchTotals b;
    b.seed = j.at("seed").get<std::uint64_t>();
    b.index = j.at("index").get<int>();
    b.duration = j.at("duration").get<double>();
    b.tail_time = j.at("tail_time").get<std::vector<double>>();
    b.regulator = j.at("regulator").get<std::array<double, 2>>();
    b.empty_time = j.at("empty_time").get<double>();
    b.palm_atom = j.at("palm_atom").get<std::array<double, 2>>();
    b.palm_tail = j.at("palm_tail").get<std::array<std::vector<double>, 2>>();
    b.boundary_joint = j.at("boundary_joint").get<std::array<std::vector<double>, 2>>();
    b.mgf = j.at("mgf").get<std::vector<double>>();
    b.palm_mgf = j.at("palm_mgf").get<std::array<std::vector<double>, 2>>();
    b.boundary_mgf = j.at("boundary_mgf").get<std::array<std::vector<double>, 2>>();
    b.majorant_tail = j.at("majorant_tail").get<std::array<std::vector<double>, 2>>();
    return b;
}

json invariants_json(const InvariantReport& inv) {
    return {{"epochs", inv.epochs},
            {"max_reflection_residual", inv.max_reflection_residual},
            {"complementarity_mass", inv.complementarity_mass},
            {"min_content", inv.min_content},
            {"dominance_violations", inv.dominance_violations},
            // -inf when no majorant was tracked; JSON has no infinities
            {"max_dominance_gap", std::isfinite(inv.max_dominance_gap) ? json(inv.max_dominance_gap) : json()}};
}

InvariantReport invariants_from(const json& j) {
    InvariantReport inv;
    inv.epochs = j.at("epochs").get<std::uint64_t>();
    inv.max_reflection_residual = j.at("max_reflection_residual").get<double>();
    inv.complementarity_mass = j.at("complementarity_mass").get<double>();
    inv.min_content = j.at("min_content").get<double>();
    inv.dominance_violations = j.at("dominance_violations").get<std::uint64_t>();
    if (!j.at("max_dominance_gap").is_null()) inv.max_dominance_gap = j.at("max_dominance_gap").get<double>();
    return inv;
}

}  // namespace

void write_stats_json(const PathStats& stats, const std::string& path) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["grid"] = stats.grid();
    json dirs = json::array();
    for (const auto& c : stats.directions()) dirs.push_back({c.c1, c.c2});
    j["directions"] = dirs;
    j["thetas"] = stats.thetas();
    j["poisson"] = stats.poisson();
    j["majorant"] = stats.majorant_tracked();
    j["invariants"] = invariants_json(stats.invariants());
    json batches = json::array();
    for (const auto& b : stats.batches()) batches.push_back(batch_json(b));
    j["batches"] = batches;
    report::write_text(path, j.dump(1) + "\n");
}

PathStats read_stats_json(const std::string& path) {
    try {
        const json j = json::parse(report::read_text(path));
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw std::runtime_error("unsupported statistics schema in '" + path + "'");
        std::vector<Direction> dirs;
        for (const auto& d : j.at("directions")) dirs.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
        std::vector<BatchTotals> batches;
        for (const auto& b : j.at("batches")) batches.push_back(batch_from(b));
        return PathStats(j.at("grid").get<std::vector<double>>(), std::move(dirs),
                         j.at("thetas").get<std::vector<std::array<double, 2>>>(), j.at("poisson").get<bool>(),
                         j.at("majorant").get<bool>(), std::move(batches), invariants_from(j.at("invariants")));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed statistics file '" + path + "': " + e.what());
    }
}

std::string manifest_json(const RunManifest& m, bool with_timing) {
    json j;
    j["config_hash"] = m.config_hash;
    j["tool_version"] = m.tool_version;
    j["config"] = json::parse(m.config_json);
    j["seeds"] = m.seeds;
    j["seed_files"] = m.seed_files;
    j["merged_csv"] = m.merged_csv;
    j["stats_json"] = m.stats_json;
    j["invariants"] = invariants_json(m.invariants);
    j["invariants_ok"] = m.invariants_ok;
    j["invariant_failures"] = m.invariant_failures;
    if (with_timing) j["wall_clock_seconds"] = m.wall_clock_seconds;
    return j.dump(2) + "\n";
}

}  // namespace fluidnet
