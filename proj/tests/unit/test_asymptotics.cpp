#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "fluidnet/asymptotics.hpp"
#include "fluidnet/simulator.hpp"

using namespace fluidnet;
using doctest::Approx;

namespace {
BoundOptions mode(BoundMode m, std::size_t draws = 200000) {
    BoundOptions o;
    o.mode = m;
    o.draws = draws;
    return o;
}
}  // namespace

TEST_CASE("single-node bounds") {
    const auto p = fixtures::symmetric_pareto();
    const auto d = derive(p);
    const auto grid = log_grid(1.0, 100.0, 8);
    const auto a = theorem41_bounds(d, p.jumps().component(0), grid, mode(BoundMode::GeomSumAsymptotic));
    const double ratio = d.r_upper[0] * (1 - d.r_lower[0]) / (d.r_lower[0] * (1 - d.r_upper[0]));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(a.lower[k] <= a.upper[k]);
        if (!a.upper_clamped[k]) CHECK(a.upper[k] / a.lower[k] == Approx(ratio));
    }
    // alpha1/mu1 < r'1 < r1 < 1
    CHECK(d.input_rate[0] / d.mu[0] < d.r_lower[0]);
    CHECK(d.r_lower[0] < d.r_upper[0]);
    CHECK(d.r_upper[0] < 1.0);

    const auto e = theorem41_bounds(d, p.jumps().component(0), grid, mode(BoundMode::GeomSumExact));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(e.lower[k] <= e.upper[k]);
        if (k) CHECK(e.upper[k] <= e.upper[k - 1]);
    }
}

TEST_CASE("exact mode against the exponential closed form") {
    const auto p = fixtures::symmetric();  // r1 = 1/2, exponential(1) jumps
    const auto d = derive(p);
    const std::vector<double> grid{0.0, 1.0, 3.0, 6.0};
    const auto e = theorem41_bounds(d, p.jumps().component(0), grid, mode(BoundMode::GeomSumExact, 400000));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double exact = 0.5 * std::exp(-0.5 * grid[k]);
        CHECK(std::abs(e.upper[k] - exact) < 4.0 * e.upper_se[k]);
        const double exact_lower = d.r_lower[0] * std::exp(-(1 - d.r_lower[0]) * grid[k]);
        CHECK(std::abs(e.lower[k] - exact_lower) < 4.0 * e.lower_se[k]);
    }
    // the geometric sum at zero is P(N >= 1) = r
    CHECK(std::abs(e.upper[0] - 0.5) < 4.0 * e.upper_se[0]);
}

TEST_CASE("two-dimensional bounds") {
    const auto p = fixtures::symmetric_pareto();
    const auto d = derive(p);
    const auto grid = log_grid(0.5, 50.0, 6);
    const auto c0 = classify_direction(d, Direction(0.5, 0.5));
    REQUIRE(c0.kind == DirectionCase::C0);
    CHECK(c0.r == Approx(d.input_rate[0] / d.drain[0]));
    for (BoundMode m : {BoundMode::GeomSumExact, BoundMode::GeomSumAsymptotic})
        for (EtaReading er : {EtaReading::Printed, EtaReading::Symmetric}) {
            auto o = mode(m);
            o.eta_reading = er;
            const auto r = theorem42_bounds(d, c0, p.jumps(), grid, o);
            for (std::size_t k = 0; k < grid.size(); ++k) CHECK(r.lower[k] <= r.upper[k]);
            // symmetric network: both readings give the same weights
            CHECK(r.upper_weights[1] == Approx(d.drain[1] * c0.eta[1]));
        }

    // degeneration: c = (1, 0) reproduces the single-node constants
    const auto e1 = classify_direction(d, Direction(1.0, 0.0));
    const auto r2 = theorem42_bounds(d, e1, p.jumps(), grid, mode(BoundMode::GeomSumAsymptotic));
    const auto r1 = theorem41_bounds(d, p.jumps().component(0), grid, mode(BoundMode::GeomSumAsymptotic));
    CHECK(r2.r_lower == r1.r_lower);
    CHECK(r2.r_upper == r1.r_upper);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(r2.lower[k] == Approx(r1.lower[k]));

    const auto c1 = classify_direction(d, Direction(0.9, 0.1));
    const auto r = theorem42_bounds(d, c1, p.jumps(), grid, mode(BoundMode::GeomSumExact));
    CHECK(r.upper_weights[1] == 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(r.lower[k] <= r.upper[k]);
    CHECK(tail_constant_K(d, c0) > 0.0);
    CHECK(std::isfinite(tail_constant_K(d, c1)));
}

TEST_CASE("exact asymptote") {
    const auto p = fixtures::reference();
    const auto d = derive(p);
    const ExactAsymptote lb(d, p.jumps().mixture(), Direction(1.0, 0.0));
    const double k1 = d.input_rate[0] / (d.net_drain[0] + d.p21 * d.net_drain[1]);
    CHECK(lb.coefficients()[0] == Approx(10.0 / 3.0));
    CHECK(lb(50.0) == Approx(k1 * integrated_tail(HeavyDist::pareto(1.0, 2.5)).tail(50.0)));
    CHECK(lb.term(1, 50.0) == 0.0);
    // r'/(1-r') < k1 < alpha1/Delta1
    CHECK(d.r_lower[0] / (1 - d.r_lower[0]) < k1);
    CHECK(k1 < d.input_rate[0] / d.net_drain[0]);
    CHECK(lb.subexponential());

    // two-term form with the x/0 convention
    const ExactAsymptote both(d, p.jumps().mixture(), Direction(0.5, 0.5));
    CHECK(both(20.0) == Approx(2.0 * k1 * integrated_tail(HeavyDist::pareto(1.0, 2.5)).tail(40.0)));
}

TEST_CASE("single-big-jump series") {
    const auto p = fixtures::reference();
    const auto d = derive(p);
    const auto& m = p.jumps().mixture();
    const double x = 50.0;
    const auto s = big_jump_series(d, m, 1.0, Direction(1.0, 0.0), x);
    // brute force over 10^6 terms, independent of the truncation rule
    const double step = d.coupled_net_drain(0);
    double brute = 0.0;
    for (long n = 0; n < 1000000; ++n) brute += m.p1 * m.first.tail(x + n * step);
    const double rest = m.p1 * m.first.mean() / step * integrated_tail(m.first).tail(x + 1e6 * step);
    CHECK(s.lower() <= (brute + rest) * (1 + 1e-9));
    CHECK(brute <= s.upper() * (1 + 1e-9));
    const double integral = ExactAsymptote(d, m, Direction(1.0, 0.0))(x);
    CHECK(std::abs(s.value() - integral) / integral < 0.05);
}

TEST_CASE("equivalence report on simulated data") {
    const auto p = fixtures::symmetric();
    SimulationOptions o;
    o.horizon = 1e5;
    o.grid = log_grid(0.1, 20.0, 10);
    const auto stats = run(p, o, 9);
    const auto self = weak_equivalence_report(stats, 0, [&](double x) {
        const auto& g = stats.grid();
        const auto k = std::find(g.begin(), g.end(), x) - g.begin();
        return stats.tail(0, static_cast<std::size_t>(k)).value;
    });
    for (const auto& pt : self.admissible()) CHECK(pt.ratio == Approx(1.0));
    CHECK_FALSE(self.insufficient_resolution);

    // Z1 tail against F1^I for subexponential jumps: inside the first-order envelope
    // with slack. Light traffic, so that the first-order regime starts at moderate x.
    const NetworkParams q({2.0, 2.0}, 0.5, 0.5, PoissonArrivals{0.2},
                          MixtureJumps{0.5, HeavyDist::pareto(1.0, 2.5), HeavyDist::pareto(1.0, 2.5)});
    const auto d = derive(q);
    o.horizon = 5e6;
    o.grid = log_grid(2.0, 30.0, 8);
    const auto heavy = run(q, o, 9);
    const auto it = integrated_tail(q.jumps().component(0));
    const auto rep = weak_equivalence_report(heavy, 0, [&](double x) { return it.tail(x); });
    CHECK(rep.admissible().size() >= 3);
    for (const auto& pt : rep.admissible()) {
        CHECK(pt.ratio >= 0.7 * d.r_lower[0] / (1 - d.r_lower[0]));
        CHECK(pt.ratio <= 1.3 * d.r_upper[0] / (1 - d.r_upper[0]));
    }
}

TEST_CASE("trend fit") {
    EquivalenceReport rep;
    for (double x : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0})
        rep.points.push_back({x, 1.0, 0.01, 1.0, 1.0 + 0.5 / std::log(x + 1.0), true});
    rep.insufficient_resolution = false;
    const auto fit = ratio_trend_last_decade(rep);
    CHECK(fit.points == 4);
    CHECK(fit.slope < 0.0);
    CHECK(fit.toward_one());
}
