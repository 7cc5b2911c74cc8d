#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "fluidnet/simulator.hpp"

using namespace fluidnet;
using doctest::Approx;

namespace {
SimulationOptions options(double horizon) {
    SimulationOptions o;
    o.horizon = horizon;
    o.grid = log_grid(0.1, 10.0, 12);
    o.directions = {Direction(1.0, 0.0), Direction(0.0, 1.0), Direction(0.5, 0.5)};
    o.thetas = {{-0.5, 0.0}, {0.0, -0.5}, {-1.0, -1.0}};
    o.batches = 10;
    return o;
}
}  // namespace

TEST_CASE("grids") {
    const auto g = log_grid(0.5, 2000.0, 30);
    CHECK(g.size() == 30);
    CHECK(g.front() == 0.5);
    CHECK(g.back() == 2000.0);
    CHECK(g[1] / g[0] == Approx(g[29] / g[28]));
    CHECK(linear_grid(0.0, 1.0, 5)[2] == 0.5);
    CHECK_THROWS(log_grid(0.0, 1.0, 4));
}

TEST_CASE("student t quantiles") {
    CHECK(student_t_975(1) == Approx(12.7062).epsilon(1e-4));
    CHECK(student_t_975(19) == Approx(2.0930).epsilon(1e-4));
}

TEST_CASE("regulator rates and pathwise identities") {
    const auto p = fixtures::symmetric();
    const auto d = derive(p);
    const auto stats = run(p, options(2e5), 1);
    const auto& inv = stats.invariants();
    CHECK(inv.max_reflection_residual < 1e-9);
    CHECK(inv.complementarity_mass == 0.0);
    CHECK(inv.min_content >= 0.0);
    for (int i = 0; i < 2; ++i) {
        const auto e = stats.regulator_rate(i);
        CHECK(std::abs(e.value - d.boundary_mass(i)) < 4.0 * e.halfwidth);
        // nu_i({0}) = mu_i pi(0)
        CHECK(stats.palm_atom_rate(i).value == Approx(d.mu[i] * stats.empty_fraction().value).epsilon(1e-9));
        for (std::size_t k = 0; k < stats.grid().size(); ++k)
            CHECK(stats.palm_tail(i, k).value ==
                  Approx(d.drain[i] * stats.boundary_joint(1 - i, k).value).epsilon(1e-9));
    }
    // tails are nonincreasing in x
    for (std::size_t dir = 0; dir < 3; ++dir)
        for (std::size_t k = 1; k < stats.grid().size(); ++k)
            CHECK(stats.tail(dir, k).value <= stats.tail(dir, k - 1).value);
}

TEST_CASE("almost-empty system") {
    const auto p = fixtures::symmetric(1e-3);
    const auto stats = run(p, options(1e6), 3);
    CHECK(stats.empty_fraction().value > 0.999);
}

TEST_CASE("balance residual") {
    const auto p = fixtures::symmetric();
    const auto d = derive(p);
    const auto stats = run_replications(p, options(2e5), {1, 2}, 2);
    for (const auto& th : stats.thetas()) {
        const auto e = balance_residual(stats, d, p.jumps(), th);
        CHECK(e.value < 4.0 * e.std_error + 1e-12);
    }
    CHECK_THROWS(balance_residual(stats, d, p.jumps(), {-0.25, -0.25}));
}

TEST_CASE("majorant dominance and the M/G/1 oracle") {
    const auto p = fixtures::symmetric();
    const auto d = derive(p);
    auto o = options(2e5);
    const auto r = run_majorant(p, o, 4);
    CHECK(r.pathwise_dominance);
    CHECK(r.stats.majorant_tracked());
    // the node-1 majorant is an M/G/1 queue with rho = r1 = 1/2 and exponential(1)
    // jumps arriving at rate 1/2: P(W > x) = r1 exp(-(1 - r1) x)
    for (std::size_t k = 0; k < o.grid.size(); ++k) {
        const auto e = r.stats.majorant_tail(0, k);
        const double exact = 0.5 * std::exp(-0.5 * o.grid[k]);
        if (e.value > 10 * e.halfwidth) CHECK(std::abs(e.value - exact) < 4.0 * e.halfwidth);
        CHECK(e.value >= r.stats.tail(0, k).value);
    }
}

TEST_CASE("merging is order independent and seeds are reproducible") {
    const auto p = fixtures::symmetric();
    const auto o = options(2e4);
    const auto a = run(p, o, 1), b = run(p, o, 2), c = run(p, o, 3);
    const auto ab_c = merge(merge(a, b), c);
    const auto c_ba = merge(c, merge(b, a));
    CHECK(ab_c.tail(2, 3).value == c_ba.tail(2, 3).value);
    CHECK(ab_c.tail(2, 3).halfwidth == c_ba.tail(2, 3).halfwidth);
    CHECK(ab_c.regulator_rate(0).value == c_ba.regulator_rate(0).value);
    // merged tail = time-weighted mean of per-seed tails
    const double w = a.observed_time() + b.observed_time() + c.observed_time();
    const double weighted = (a.tail(0, 2).value * a.observed_time() + b.tail(0, 2).value * b.observed_time() +
                             c.tail(0, 2).value * c.observed_time()) / w;
    CHECK(ab_c.tail(0, 2).value == Approx(weighted).epsilon(1e-12));
    CHECK(run(p, o, 2).tail(0, 4).value == b.tail(0, 4).value);
    CHECK(run_replications(p, o, {1, 2, 3}, 3).tail(1, 1).value == ab_c.tail(1, 1).value);
}

TEST_CASE("unstable parameters are refused") {
    CHECK_THROWS_AS(run(fixtures::symmetric(3.9), options(1e3), 1), std::invalid_argument);
}
