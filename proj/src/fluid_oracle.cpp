#include "fluidnet/fluid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fluidnet/dynamics.hpp"

namespace fluidnet {

namespace {

void require_strong(const DerivedQuantities& d) {
    if (!(d.net_drain[0] > 0.0 && d.net_drain[1] > 0.0))
        throw std::invalid_argument("fluid oracle requires Delta1 > 0 and Delta2 > 0");
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

std::array<double, 2> drain_times(const FluidState& fs, const DerivedQuantities& d) {
    require_strong(d);
    return {fs.y1 / d.net_drain[0], fs.y2 / d.net_drain[1]};
}

std::array<double, 2> fluid_contents(const FluidState& fs, const DerivedQuantities& d) {
    require_strong(d);
    if (fs.y1 < 0.0 || fs.y2 < 0.0 || !(fs.t >= 0.0)) throw std::invalid_argument("invalid fluid state");
    const double t = fs.t;
    const auto& D = d.net_drain;
    return {pos(fs.y1 - t * D[0] - d.p21 * pos(t * D[1] - fs.y2)),
            pos(fs.y2 - t * D[1] - d.p12 * pos(t * D[0] - fs.y1))};
}

bool reachability(const FluidState& fs, const DerivedQuantities& d, Direction c, double x) {
    if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
    const auto z = fluid_contents(fs, d);
    return c.c1 * z[0] + c.c2 * z[1] >= x;
}

bool corollary_max_form(const FluidState& fs, const DerivedQuantities& d, Direction c, double x) {
    require_strong(d);
    const double t = fs.t;
    const double a = c.c1 * (fs.y1 - t * d.coupled_net_drain(0));
    const double b = c.c2 * (fs.y2 - t * d.coupled_net_drain(1));
    return std::max(a, b) > x;
}

std::array<double, 2> integrate_fluid(const FluidState& fs, const DerivedQuantities& d, double dt) {
    require_strong(d);
    if (!(dt > 0.0) || dt > 1e-4 * fs.t * (1.0 + 1e-12))
        throw std::invalid_argument("Euler step must be positive and at most 1e-4 t");
    std::array<double, 2> z{fs.y1, fs.y2};
    const auto steps = static_cast<long>(std::ceil(fs.t / dt - 1e-9));
    const double h = fs.t / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
        const FlowRates r = regime_rates(d, z, d.input_rate);
        for (int i = 0; i < 2; ++i) z[i] = std::max(0.0, z[i] + h * r.content[i]);
    }
    return z;
}

std::vector<BigJumpThreshold> big_jump_thresholds(const DerivedQuantities& d, double a, Direction c, double x,
                                                  int n_max) {
    require_strong(d);
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
    if (!(a > 0.0)) throw std::invalid_argument("mean interarrival time must be positive");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<BigJumpThreshold> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        BigJumpThreshold b;
        b.n = n;
        for (int i = 0; i < 2; ++i)
            b.threshold[i] = c[i] > 0.0 ? x / c[i] + n * a * d.coupled_net_drain(i) : inf;
        out.push_back(b);
    }
    return out;
}

OracleSuiteReport run_oracle_suite(const DerivedQuantities& d, const OracleSuiteOptions& opt) {
    require_strong(d);
    Rng rng(opt.seed);
    const double rate_bound = d.mu[0] + d.mu[1] + d.input_rate[0] + d.input_rate[1];
    OracleSuiteReport rep;
    for (std::size_t k = 0; k < opt.tuples; ++k) {
        FluidState fs;
        fs.t = 0.5 + 9.5 * rng.uniform();
        // levels spread around the drain thresholds so all sub-cases occur
        fs.y1 = 2.0 * fs.t * d.net_drain[0] * rng.uniform();
        fs.y2 = 2.0 * fs.t * d.net_drain[1] * rng.uniform();
        const double u = rng.uniform();
        const Direction c = u < 0.2 ? Direction(1.0, 0.0) : u < 0.4 ? Direction(0.0, 1.0) : [&] {
            const double c1 = rng.uniform();
            return Direction(c1, 1.0 - c1);
        }();
        const auto closed = fluid_contents(fs, d);
        const double level = c.c1 * closed[0] + c.c2 * closed[1];
        const double x = std::max(0.0, level * (0.5 + rng.uniform()) + 0.05 * (rng.uniform() - 0.5));

        const auto L = drain_times(fs, d);
        rep.subcases[(L[0] < fs.t ? 2 : 0) + (L[1] < fs.t ? 1 : 0)]++;

        const double dt = opt.relative_step * fs.t;
        const auto euler = integrate_fluid(fs, d, dt);
        const double ez = c.c1 * euler[0] + c.c2 * euler[1];
        ++rep.tuples;
        if (reachability(fs, d, c, x) == (ez >= x)) {
            ++rep.agreements;
        } else {
            ++rep.disagreements;
            if (std::abs(ez - x) >= 10.0 * dt * rate_bound) ++rep.outside_band;
        }
    }
    return rep;
}

}  // namespace fluidnet
