#include "doctest.h"
#include "fixtures.hpp"

using namespace fluidnet;
using doctest::Approx;

TEST_CASE("derived quantities of the symmetric example") {
    const auto d = derive(fixtures::symmetric());
    for (int i = 0; i < 2; ++i) {
        CHECK(d.drain[i] == Approx(1.0));
        CHECK(d.input_rate[i] == Approx(0.5));
        CHECK(d.net_drain[i] == Approx(0.5));
        CHECK(d.net_drain_via_load[i] == Approx(d.net_drain[i]));
        CHECK(d.load[i] == Approx(0.5));
        CHECK(d.r_upper[i] == Approx(0.5));
        CHECK(d.r_lower[i] == Approx(1.0 / 3.0));
    }
    CHECK(check_stability(d) == Stability::StronglyStable);
    // R R^-1 = I
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k) s += d.reflection[i][k] * d.reflection_inverse[k][j];
            CHECK(s == Approx(i == j ? 1.0 : 0.0));
        }
}

TEST_CASE("derived quantities of an asymmetric example") {
    // m = (0.5, 0.25) via p1 = 2/3 with means 3/4 and 3/4
    const NetworkParams p({2.0, 1.0}, 0.0, 0.5, PoissonArrivals{1.0},
                          MixtureJumps{2.0 / 3.0, HeavyDist::exponential(4.0 / 3.0), HeavyDist::exponential(4.0 / 3.0)});
    const auto d = derive(p);
    CHECK(d.jump_mean[0] == Approx(0.5));
    CHECK(d.jump_mean[1] == Approx(0.25));
    CHECK(d.drain[0] == Approx(1.5));
    CHECK(d.drain[1] == Approx(1.0));
    CHECK(d.net_drain[0] == Approx(1.0));
    CHECK(d.net_drain[1] == Approx(0.75));
    CHECK(d.load[0] == Approx(0.3125));
    CHECK(d.net_drain_via_load[0] == Approx(1.0));
    CHECK(d.net_drain_via_load[1] == Approx(0.75));
}

TEST_CASE("stability classes") {
    DerivedQuantities d;
    d.p12 = d.p21 = 0.5;
    d.net_drain = {0.5, 0.5};
    CHECK(check_stability(d) == Stability::StronglyStable);
    d.net_drain = {-0.1, 0.5};
    CHECK(check_stability(d) == Stability::Stable);
    d.net_drain = {-1.0, 0.1};
    CHECK(check_stability(d) == Stability::Unstable);
    CHECK(check_stability(derive(fixtures::symmetric(3.9))) == Stability::Unstable);
}

TEST_CASE("direction classification") {
    const auto d = derive(fixtures::symmetric());
    const auto c0 = classify_direction(d, Direction(0.5, 0.5));
    CHECK(c0.kind == DirectionCase::C0);
    CHECK(c0.eta[0] == Approx(0.5));
    CHECK(c0.eta[1] == Approx(0.5));
    CHECK(c0.r == Approx(0.5));
    const auto c1 = classify_direction(d, Direction(1.0, 0.0));
    CHECK(c1.kind == DirectionCase::C1);
    REQUIRE(c1.r_lower);
    CHECK(*c1.r_lower == Approx(d.r_lower[0]));
    CHECK(c1.r == Approx(d.r_upper[0]));
    CHECK(classify_direction(d, Direction(0.0, 1.0)).kind == DirectionCase::C2);
    CHECK(classify_direction(d, Direction(0.9, 0.1)).kind == DirectionCase::C1);
    CHECK(classify_direction(d, Direction(0.1, 0.9)).kind == DirectionCase::C2);
}

TEST_CASE("node swap") {
    const NetworkParams p({2.0, 3.0}, 0.2, 0.6, PoissonArrivals{1.0},
                          MixtureJumps{0.3, HeavyDist::pareto(1.0, 2.5), HeavyDist::exponential(2.0)});
    const auto d = derive(p);
    const auto s = swap_nodes(d);
    CHECK(s.drain[0] == d.drain[1]);
    CHECK(s.net_drain[1] == d.net_drain[0]);
    CHECK(s.p12 == d.p21);
    CHECK(swap_nodes(s) == d);
}

TEST_CASE("continuous input reduction") {
    const auto p = fixtures::symmetric();
    CHECK(reduce_continuous_input(p, 0.0, 0.0).mu() == p.mu());
    const auto r = reduce_continuous_input(p, 0.3, 0.0);
    CHECK(r.mu(0) == Approx(1.2));
    CHECK(r.mu(1) == Approx(1.6));
    const auto s = reduce_continuous_input(p, 0.2, 0.2);
    CHECK(s.mu(0) == s.mu(1));
}

TEST_CASE("parameter validation") {
    const MixtureJumps j{0.5, HeavyDist::exponential(1.0), HeavyDist::exponential(1.0)};
    CHECK_THROWS_AS(NetworkParams({2.0, 2.0}, 1.0, 1.0, PoissonArrivals{1.0}, j), std::invalid_argument);
    CHECK_THROWS_AS(NetworkParams({0.0, 2.0}, 0.5, 0.5, PoissonArrivals{1.0}, j), std::invalid_argument);
    CHECK_THROWS_AS(NetworkParams({2.0, 2.0}, 0.5, 0.5, PoissonArrivals{-1.0}, j), std::invalid_argument);
}
