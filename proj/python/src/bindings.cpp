#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fluidnet/asymptotics.hpp"
#include "fluidnet/fluid_oracle.hpp"
#include "fluidnet/harness.hpp"
#include "fluidnet/simulator.hpp"

namespace py = pybind11;
using namespace fluidnet;

namespace {

py::dict derived_dict(const DerivedQuantities& d) {
    py::dict out;
    out["mu"] = d.mu;
    out["p12"] = d.p12;
    out["p21"] = d.p21;
    out["lambda"] = d.lambda;
    out["jump_mean"] = d.jump_mean;
    out["delta"] = d.drain;
    out["alpha"] = d.input_rate;
    out["Delta"] = d.net_drain;
    out["rho"] = d.load;
    out["r"] = d.r_upper;
    out["r_prime"] = d.r_lower;
    out["stability"] = to_string(check_stability(d));
    return out;
}

py::dict bounds_dict(const BoundReport& r) {
    py::dict out;
    out["direction"] = std::array<double, 2>{r.c.c1, r.c.c2};
    out["case"] = to_string(r.kind);
    out["x"] = r.grid;
    out["lower"] = r.lower;
    out["upper"] = r.upper;
    out["lower_se"] = r.lower_se;
    out["upper_se"] = r.upper_se;
    out["mode"] = to_string(r.upper_kind);
    out["r_upper"] = r.r_upper;
    out["r_lower"] = r.r_lower;
    return out;
}

py::dict stats_dict(const PathStats& s) {
    py::dict out;
    out["x"] = s.grid();
    py::list tails;
    for (std::size_t dir = 0; dir < s.directions().size(); ++dir) {
        std::vector<double> v, hw;
        for (std::size_t k = 0; k < s.grid().size(); ++k) {
            const auto e = s.tail(dir, k);
            v.push_back(e.value);
            hw.push_back(e.halfwidth);
        }
        py::dict t;
        t["direction"] = std::array<double, 2>{s.directions()[dir].c1, s.directions()[dir].c2};
        t["tail"] = v;
        t["halfwidth"] = hw;
        tails.append(t);
    }
    out["tails"] = tails;
    out["y_rate"] = std::array<double, 2>{s.regulator_rate(0).value, s.regulator_rate(1).value};
    out["empty_fraction"] = s.empty_fraction().value;
    out["max_reflection_residual"] = s.invariants().max_reflection_residual;
    out["dominance_violations"] = s.invariants().dominance_violations;
    out["epochs"] = s.invariants().epochs;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-node stochastic fluid network with heavy-tailed batch input";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<HeavyDist>(m, "HeavyDist")
        .def_static("pareto", &HeavyDist::pareto, py::arg("scale"), py::arg("index"))
        .def_static("weibull", &HeavyDist::weibull, py::arg("scale"), py::arg("shape"))
        .def_static("lognormal", &HeavyDist::lognormal, py::arg("log_mean"), py::arg("log_std"))
        .def_static("exponential", &HeavyDist::exponential, py::arg("rate"))
        .def_static("deterministic", &HeavyDist::deterministic, py::arg("value"))
        .def_property_readonly("mean", &HeavyDist::mean)
        .def("tail", &HeavyDist::tail, py::arg("x"))
        .def("density", &HeavyDist::density, py::arg("x"))
        .def("sample_at", &HeavyDist::sample_at, py::arg("u"))
        .def("integrated_tail", [](const HeavyDist& d, double x) { return integrated_tail(d).tail(x); },
             py::arg("x"))
        .def("subexponential", &HeavyDist::subexponential)
        .def("__repr__", &HeavyDist::describe);

    py::class_<Direction>(m, "Direction")
        .def(py::init<double, double>(), py::arg("c1"), py::arg("c2"))
        .def_readonly("c1", &Direction::c1)
        .def_readonly("c2", &Direction::c2);
    py::implicitly_convertible<py::tuple, Direction>();

    py::class_<NetworkParams>(m, "Network")
        .def(py::init([](std::array<double, 2> mu, double p12, double p21, double rate, double p1,
                         const HeavyDist& f1, const HeavyDist& f2) {
                 return NetworkParams(mu, p12, p21, PoissonArrivals{rate}, MixtureJumps{p1, f1, f2});
             }),
             py::arg("mu"), py::arg("p12"), py::arg("p21"), py::arg("rate"), py::arg("p1"), py::arg("dist1"),
             py::arg("dist2"), "Poisson arrivals with one-dimensional (mixture) jumps.")
        .def_static("renewal",
                    [](std::array<double, 2> mu, double p12, double p21, const HeavyDist& gap, double p1,
                       const HeavyDist& f1, const HeavyDist& f2) {
                        return NetworkParams(mu, p12, p21, RenewalArrivals{gap}, MixtureJumps{p1, f1, f2});
                    },
                    py::arg("mu"), py::arg("p12"), py::arg("p21"), py::arg("interarrival"), py::arg("p1"),
                    py::arg("dist1"), py::arg("dist2"))
        .def_static("from_yaml", [](const std::string& text) { return parse_config(text).network; })
        .def("derive", [](const NetworkParams& p) { return derived_dict(derive(p)); });

    m.def("classify_direction", [](const NetworkParams& p, std::array<double, 2> c) {
        const auto dc = classify_direction(derive(p), Direction(c[0], c[1]));
        py::dict out;
        out["case"] = to_string(dc.kind);
        out["r"] = dc.r;
        out["r_prime"] = dc.r_lower ? py::cast(*dc.r_lower) : py::none();
        out["eta"] = dc.eta;
        return out;
    });

    m.def(
        "simulate",
        [](const NetworkParams& p, double horizon, std::vector<double> grid,
           std::vector<std::array<double, 2>> directions, std::vector<std::uint64_t> seeds, bool majorant,
           int workers) {
            SimulationOptions o;
            o.horizon = horizon;
            o.grid = std::move(grid);
            o.directions.clear();
            for (const auto& c : directions) o.directions.emplace_back(c[0], c[1]);
            o.track_majorant = majorant;
            PathStats s;
            {
                py::gil_scoped_release release;
                s = run_replications(p, o, seeds, workers);
            }
            return stats_dict(s);
        },
        py::arg("network"), py::arg("horizon"), py::arg("grid"),
        py::arg("directions") = std::vector<std::array<double, 2>>{{1.0, 0.0}},
        py::arg("seeds") = std::vector<std::uint64_t>{1}, py::arg("majorant") = false, py::arg("workers") = 1);

    m.def(
        "single_node_bounds",
        [](const NetworkParams& p, std::vector<double> grid, const std::string& mode, std::size_t draws,
           std::uint64_t seed, int node) {
            BoundOptions o;
            o.mode = bound_mode_from_string(mode);
            o.draws = draws;
            o.seed = seed;
            return bounds_dict(theorem41_bounds(derive(p), p.jumps().component(node), grid, o, node));
        },
        py::arg("network"), py::arg("grid"), py::arg("mode") = "asymptotic", py::arg("draws") = 1'000'000,
        py::arg("seed") = 1, py::arg("node") = 0);

    m.def(
        "directional_bounds",
        [](const NetworkParams& p, std::array<double, 2> c, std::vector<double> grid, const std::string& mode,
           const std::string& eta_reading, std::size_t draws, std::uint64_t seed) {
            const auto d = derive(p);
            BoundOptions o;
            o.mode = bound_mode_from_string(mode);
            o.eta_reading = eta_reading_from_string(eta_reading);
            o.draws = draws;
            o.seed = seed;
            return bounds_dict(theorem42_bounds(d, classify_direction(d, Direction(c[0], c[1])), p.jumps(), grid, o));
        },
        py::arg("network"), py::arg("direction"), py::arg("grid"), py::arg("mode") = "asymptotic",
        py::arg("eta_reading") = "printed", py::arg("draws") = 1'000'000, py::arg("seed") = 1);

    m.def(
        "exact_asymptote",
        [](const NetworkParams& p, std::array<double, 2> c, std::vector<double> xs) {
            const ExactAsymptote lb(derive(p), p.jumps().mixture(), Direction(c[0], c[1]));
            std::vector<double> out;
            for (double x : xs) out.push_back(lb(x));
            return out;
        },
        py::arg("network"), py::arg("direction"), py::arg("x"));

    m.def(
        "big_jump_series",
        [](const NetworkParams& p, double a, std::array<double, 2> c, double x) {
            const auto s = big_jump_series(derive(p), p.jumps().mixture(), a, Direction(c[0], c[1]), x);
            return py::make_tuple(s.value(), s.lower(), s.upper(), s.terms);
        },
        py::arg("network"), py::arg("a"), py::arg("direction"), py::arg("x"));

    m.def(
        "reachable",
        [](const NetworkParams& p, double y1, double y2, double t, std::array<double, 2> c, double x) {
            return reachability({y1, y2, t}, derive(p), Direction(c[0], c[1]), x);
        },
        py::arg("network"), py::arg("y1"), py::arg("y2"), py::arg("t"), py::arg("direction"), py::arg("x"));

    m.def(
        "fluid_contents",
        [](const NetworkParams& p, double y1, double y2, double t) { return fluid_contents({y1, y2, t}, derive(p)); },
        py::arg("network"), py::arg("y1"), py::arg("y2"), py::arg("t"));

    m.def("config_hash", [](const std::string& yaml_text) { return parse_config(yaml_text).hash(); });
    m.def("derive_report", [](const std::string& yaml_text) {
        std::ostringstream os;
        cmd_derive(parse_config(yaml_text), os);
        return os.str();
    });
}
