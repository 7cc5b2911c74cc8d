#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "fluidnet/harness.hpp"
#include "json.hpp"

namespace fluidnet {

using nlohmann::json;

ConfigError::ConfigError(const std::string& msg, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

void only_keys(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

const YAML::Node need(const YAML::Node& n, const char* key, const std::string& where) {
    const YAML::Node v = n[key];
    if (!v) fail(n, "missing '" + std::string(key) + "' in " + where);
    return v;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, "cannot read " + what + " from '" + n.Scalar() + "'");
    }
}

double number(const YAML::Node& parent, const char* key, const std::string& where) {
    return scalar<double>(need(parent, key, where), where + "." + key);
}

HeavyDist parse_dist(const YAML::Node& n, const std::string& where) {
    if (!n.IsMap()) fail(n, where + " must be a mapping with a 'type'");
    const auto type = scalar<std::string>(need(n, "type", where), where + ".type");
    try {
        if (type == "pareto") {
            only_keys(n, where, {"type", "scale", "index"});
            return HeavyDist::pareto(number(n, "scale", where), number(n, "index", where));
        }
        if (type == "weibull") {
            only_keys(n, where, {"type", "scale", "shape"});
            return HeavyDist::weibull(number(n, "scale", where), number(n, "shape", where));
        }
        if (type == "lognormal") {
            only_keys(n, where, {"type", "log_mean", "log_std"});
            return HeavyDist::lognormal(number(n, "log_mean", where), number(n, "log_std", where));
        }
        if (type == "exponential") {
            only_keys(n, where, {"type", "rate"});
            return HeavyDist::exponential(number(n, "rate", where));
        }
        if (type == "deterministic") {
            only_keys(n, where, {"type", "value"});
            return HeavyDist::deterministic(number(n, "value", where));
        }
    } catch (const std::invalid_argument& e) {
        fail(n, where + ": " + e.what());
    }
    fail(n, "unknown distribution type '" + type + "' in " + where);
}

std::array<double, 2> pair_of(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be a two-element list");
    return {scalar<double>(n[0], what), scalar<double>(n[1], what)};
}

NetworkParams parse_network(const YAML::Node& n) {
    only_keys(n, "network", {"mu1", "mu2", "p12", "p21", "arrival", "jumps"});
    const YAML::Node arr = need(n, "arrival", "network");
    const auto atype = scalar<std::string>(need(arr, "type", "arrival"), "arrival.type");
    ArrivalModel arrival = PoissonArrivals{1.0};
    if (atype == "poisson") {
        only_keys(arr, "arrival", {"type", "rate"});
        arrival = PoissonArrivals{number(arr, "rate", "arrival")};
    } else if (atype == "renewal") {
        only_keys(arr, "arrival", {"type", "interarrival"});
        arrival = RenewalArrivals{parse_dist(need(arr, "interarrival", "arrival"), "arrival.interarrival")};
    } else {
        fail(arr, "arrival.type must be 'poisson' or 'renewal'");
    }

    const YAML::Node j = need(n, "jumps", "network");
    const auto jtype = scalar<std::string>(need(j, "type", "jumps"), "jumps.type");
    std::optional<JumpModel> jumps;
    if (jtype == "mixture") {
        only_keys(j, "jumps", {"type", "p1", "dist1", "dist2"});
        jumps.emplace(MixtureJumps{number(j, "p1", "jumps"), parse_dist(need(j, "dist1", "jumps"), "jumps.dist1"),
                                   parse_dist(need(j, "dist2", "jumps"), "jumps.dist2")});
    } else if (jtype == "independent") {
        only_keys(j, "jumps", {"type", "dist1", "dist2"});
        jumps.emplace(IndependentJumps{parse_dist(need(j, "dist1", "jumps"), "jumps.dist1"),
                                       parse_dist(need(j, "dist2", "jumps"), "jumps.dist2")});
    } else {
        fail(j, "jumps.type must be 'mixture' or 'independent'");
    }
    try {
        return NetworkParams({number(n, "mu1", "network"), number(n, "mu2", "network")}, number(n, "p12", "network"),
                             number(n, "p21", "network"), std::move(arrival), std::move(*jumps));
    } catch (const std::invalid_argument& e) {
        fail(n, std::string("network: ") + e.what());
    }
}

json dist_json(const HeavyDist& d) {
    switch (d.family()) {
    case Family::Pareto: return {{"type", "pareto"}, {"scale", d.param1()}, {"index", d.param2()}};
    case Family::Weibull: return {{"type", "weibull"}, {"scale", d.param1()}, {"shape", d.param2()}};
    case Family::Lognormal: return {{"type", "lognormal"}, {"log_mean", d.param1()}, {"log_std", d.param2()}};
    case Family::Exponential: return {{"type", "exponential"}, {"rate", d.param1()}};
    case Family::Deterministic: return {{"type", "deterministic"}, {"value", d.param1()}};
    }
    return {};
}

}  // namespace

std::vector<double> GridSpec::build() const {
    if (kind == "log") return log_grid(min, max, points);
    if (kind == "linear") return linear_grid(min, max, points);
    throw ConfigError("grid kind must be 'log' or 'linear'");
}

GridSpec GridSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw ConfigError("grid must look like log:MIN:MAX:POINTS, got '" + text + "'");
    GridSpec g;
    g.kind = parts[0];
    try {
        g.min = std::stod(parts[1]);
        g.max = std::stod(parts[2]);
        g.points = std::stoul(parts[3]);
    } catch (const std::exception&) {
        throw ConfigError("bad number in grid '" + text + "'");
    }
    try {
        g.build();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    return g;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        try {
            const auto dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
            } else {
                const auto lo = std::stoull(item.substr(0, dash));
                const auto hi = std::stoull(item.substr(dash + 1));
                if (hi < lo) throw ConfigError("descending seed range '" + item + "'");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad seed list '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty seed list");
    if (std::set<std::uint64_t>(out.begin(), out.end()).size() != out.size())
        throw ConfigError("duplicate seeds in '" + text + "'");
    return out;
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ": " + e.msg, e.mark.line + 1);
    }
    try {
        only_keys(root, "config", {"schema_version", "network", "simulate", "analysis", "output"});
        const int version = scalar<int>(need(root, "schema_version", "config"), "schema_version");
        if (version != kSchemaVersion)
            fail(root["schema_version"], "unsupported schema_version " + std::to_string(version));

        ExperimentConfig cfg(parse_network(need(root, "network", "config")));
        cfg.source = source;

        if (const YAML::Node s = root["simulate"]) {
            only_keys(s, "simulate", {"horizon", "warmup", "seeds", "batches", "workers", "grid", "directions",
                                      "thetas", "majorant"});
            if (s["horizon"]) cfg.simulate.horizon = scalar<double>(s["horizon"], "simulate.horizon");
            if (!(cfg.simulate.horizon > 0.0)) fail(s["horizon"], "horizon must be positive");
            if (s["warmup"]) {
                cfg.simulate.warmup = scalar<double>(s["warmup"], "simulate.warmup");
                if (*cfg.simulate.warmup < 0.0) fail(s["warmup"], "warmup must be nonnegative");
            }
            if (s["batches"]) cfg.simulate.batches = scalar<int>(s["batches"], "simulate.batches");
            if (cfg.simulate.batches < 2) fail(s, "at least 2 batches are needed for error estimates");
            if (s["workers"]) cfg.workers = scalar<int>(s["workers"], "simulate.workers");
            if (cfg.workers < 1) fail(s["workers"], "workers must be >= 1");
            if (s["majorant"]) cfg.simulate.track_majorant = scalar<bool>(s["majorant"], "simulate.majorant");
            if (const YAML::Node seeds = s["seeds"]) {
                try {
                    if (seeds.IsSequence()) {
                        std::string joined;
                        for (const auto& x : seeds) joined += scalar<std::string>(x, "seed") + ",";
                        cfg.seeds = parse_seed_list(joined);
                    } else {
                        cfg.seeds = parse_seed_list(scalar<std::string>(seeds, "simulate.seeds"));
                    }
                } catch (const ConfigError& e) {
                    if (e.line() > 0) throw;
                    fail(seeds, e.what());
                }
            }
            if (const YAML::Node g = s["grid"]) {
                only_keys(g, "simulate.grid", {"kind", "min", "max", "points"});
                if (g["kind"]) cfg.grid.kind = scalar<std::string>(g["kind"], "grid.kind");
                if (g["min"]) cfg.grid.min = scalar<double>(g["min"], "grid.min");
                if (g["max"]) cfg.grid.max = scalar<double>(g["max"], "grid.max");
                if (g["points"]) cfg.grid.points = scalar<std::size_t>(g["points"], "grid.points");
                try {
                    cfg.grid.build();
                } catch (const std::exception& e) {
                    fail(g, std::string("grid: ") + e.what());
                }
            }
            if (const YAML::Node dirs = s["directions"]) {
                if (!dirs.IsSequence() || dirs.size() == 0) fail(dirs, "directions must be a nonempty list");
                cfg.simulate.directions.clear();
                for (const auto& x : dirs) {
                    const auto c = pair_of(x, "direction");
                    try {
                        cfg.simulate.directions.emplace_back(c[0], c[1]);
                    } catch (const std::invalid_argument& e) {
                        fail(x, e.what());
                    }
                }
            }
            if (const YAML::Node th = s["thetas"]) {
                if (!th.IsSequence()) fail(th, "thetas must be a list");
                for (const auto& x : th) {
                    const auto t = pair_of(x, "theta");
                    if (t[0] > 0.0 || t[1] > 0.0) fail(x, "theta must be componentwise nonpositive");
                    cfg.simulate.thetas.push_back(t);
                }
            }
        }
        if (cfg.seeds.empty()) cfg.seeds = {1};
        cfg.simulate.grid = cfg.grid.build();

        if (const YAML::Node a = root["analysis"]) {
            only_keys(a, "analysis", {"geometric_draws", "seed", "eta_reading", "modes"});
            if (a["geometric_draws"])
                cfg.analysis.geometric_draws = scalar<std::size_t>(a["geometric_draws"], "analysis.geometric_draws");
            if (cfg.analysis.geometric_draws < 1000) fail(a, "geometric_draws must be at least 1000");
            if (a["seed"]) cfg.analysis.seed = scalar<std::uint64_t>(a["seed"], "analysis.seed");
            try {
                if (a["eta_reading"])
                    cfg.analysis.eta_reading =
                        eta_reading_from_string(scalar<std::string>(a["eta_reading"], "analysis.eta_reading"));
                if (const YAML::Node m = a["modes"]) {
                    if (!m.IsSequence() || m.size() == 0) fail(m, "modes must be a nonempty list");
                    cfg.analysis.modes.clear();
                    for (const auto& x : m)
                        cfg.analysis.modes.push_back(bound_mode_from_string(scalar<std::string>(x, "mode")));
                }
            } catch (const std::invalid_argument& e) {
                fail(a, std::string("analysis: ") + e.what());
            }
        }
        if (const YAML::Node o = root["output"]) {
            only_keys(o, "output", {"dir"});
            if (o["dir"]) cfg.output_dir = scalar<std::string>(o["dir"], "output.dir");
        }
        return cfg;
    } catch (const YAML::Exception& e) {
        throw ConfigError(source + ": " + e.msg, e.mark.line + 1);
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string ExperimentConfig::canonical_json() const {
    json net;
    net["mu1"] = network.mu(0);
    net["mu2"] = network.mu(1);
    net["p12"] = network.p12();
    net["p21"] = network.p21();
    if (network.poisson()) {
        net["arrival"] = {{"type", "poisson"}, {"rate", std::get<PoissonArrivals>(network.arrival()).rate}};
    } else {
        net["arrival"] = {{"type", "renewal"},
                          {"interarrival", dist_json(std::get<RenewalArrivals>(network.arrival()).interarrival)}};
    }
    const JumpModel& j = network.jumps();
    if (j.is_mixture()) {
        net["jumps"] = {{"type", "mixture"},
                        {"p1", j.mixture().p1},
                        {"dist1", dist_json(j.mixture().first)},
                        {"dist2", dist_json(j.mixture().second)}};
    } else {
        net["jumps"] = {{"type", "independent"},
                        {"dist1", dist_json(j.independent().first)},
                        {"dist2", dist_json(j.independent().second)}};
    }

    json sim;
    sim["horizon"] = simulate.horizon;
    sim["warmup"] = simulate.warmup_time();
    sim["batches"] = simulate.batches;
    sim["majorant"] = simulate.track_majorant;
    sim["seeds"] = seeds;
    sim["grid"] = {{"kind", grid.kind}, {"min", grid.min}, {"max", grid.max}, {"points", grid.points}};
    json dirs = json::array();
    for (const auto& c : simulate.directions) dirs.push_back({c.c1, c.c2});
    sim["directions"] = dirs;
    json th = json::array();
    for (const auto& t : simulate.thetas) th.push_back({t[0], t[1]});
    sim["thetas"] = th;

    json an;
    an["geometric_draws"] = analysis.geometric_draws;
    an["seed"] = analysis.seed;
    an["eta_reading"] = to_string(analysis.eta_reading);
    json modes = json::array();
    for (auto m : analysis.modes) modes.push_back(to_string(m));
    an["modes"] = modes;

    // workers and output directory do not change results and are left out
    json root;
    root["schema_version"] = schema_version;
    root["network"] = net;
    root["simulate"] = sim;
    root["analysis"] = an;
    return root.dump();
}

std::string ExperimentConfig::hash() const {
    const std::string text = canonical_json();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

}  // namespace fluidnet
