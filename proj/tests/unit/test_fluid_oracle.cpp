#include "doctest.h"
#include "fixtures.hpp"
#include "fluidnet/fluid_oracle.hpp"

using namespace fluidnet;
using doctest::Approx;

TEST_CASE("closed-form reachability") {
    const auto d = derive(fixtures::symmetric());  // Delta = (1/2, 1/2), p21 = 1/2
    const Direction e1(1.0, 0.0);
    const double t = 2.0, x = 1.0;
    // boundary of the single-node condition with y2 = 0
    FluidState fs{x + t * 0.5 + 0.5 * t * 0.5, 0.0, t};
    CHECK(reachability(fs, d, e1, x));
    CHECK_FALSE(reachability({fs.y1 - 1e-9, 0.0, t}, d, e1, x));
    // L2 >= t: reduces to y1 >= x + t Delta1
    CHECK(reachability({x + t * 0.5, 1.5, t}, d, e1, x));
    CHECK_FALSE(reachability({x + t * 0.5 - 1e-9, 1.5, t}, d, e1, x));
    // worked case: (t D2 - y2)^+ = 0.5, level 2.4 - 1 - 0.25 = 1.15
    const FluidState w{2.4, 0.5, 2.0};
    CHECK(fluid_contents(w, d)[0] == Approx(1.15));
    CHECK(reachability(w, d, e1, 1.15));
    CHECK_FALSE(reachability(w, d, e1, 1.16));
    const auto euler = integrate_fluid(w, d, 1e-6 * w.t);
    CHECK(euler[0] == Approx(1.15).epsilon(1e-4));
}

TEST_CASE("Euler integration matches the closed form") {
    const auto d = derive(fixtures::symmetric());
    const FluidState both{5.0, 4.0, 2.0};  // L1, L2 > t
    auto z = integrate_fluid(both, d, 1e-5);
    CHECK(z[0] == Approx(4.0).epsilon(1e-6));
    CHECK(z[1] == Approx(3.0).epsilon(1e-6));
    z = integrate_fluid({0.0, 0.0, 3.0}, d, 1e-4);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    // L2 < t: Z1 = y1 - t D1 - t p21 D2 + y2 p21
    const FluidState one{6.0, 0.4, 3.0};
    z = integrate_fluid(one, d, 1e-6 * one.t);
    CHECK(z[0] == Approx(6.0 - 1.5 - 0.75 + 0.2).epsilon(1e-4));
    CHECK(fluid_contents(one, d)[0] == Approx(6.0 - 1.5 - 0.75 + 0.2));
    CHECK_THROWS(integrate_fluid(one, d, 1e-2));
}

TEST_CASE("max form") {
    const auto d = derive(fixtures::symmetric());
    const Direction c(0.5, 0.5);
    const FluidState fs{10.0, 0.0, 2.0};
    // 0.5 (10 - 2 (0.5 + 0.25)) = 4.25
    CHECK(corollary_max_form(fs, d, c, 4.2));
    CHECK_FALSE(corollary_max_form(fs, d, c, 4.25));
}

TEST_CASE("big-jump thresholds") {
    const auto d = derive(fixtures::symmetric());
    const auto th = big_jump_thresholds(d, 1.0, Direction(1.0, 0.0), 10.0, 4);
    REQUIRE(th.size() == 5);
    CHECK(th[0].threshold[0] == Approx(10.0));
    CHECK(th[4].threshold[0] == Approx(13.0));
    CHECK(std::isinf(th[4].threshold[1]));
    for (const auto& b : big_jump_thresholds(d, 1.0, Direction(0.5, 0.5), 3.0, 6))
        CHECK(b.threshold[0] == b.threshold[1]);
}

TEST_CASE("randomized equivalence suite") {
    OracleSuiteOptions o;
    o.tuples = 2000;
    const auto r = run_oracle_suite(derive(fixtures::reference()), o);
    CHECK(r.tuples == 2000);
    CHECK(r.agreement_rate() >= 0.999);
    CHECK(r.outside_band == 0);
    for (auto n : r.subcases) CHECK(n > 0);
}
