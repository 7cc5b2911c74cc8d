#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fluidnet/network.hpp"

namespace fluidnet {

/// Deterministic continuous-input fluid model started at time -t from levels (y1, y2).
struct FluidState {
    double y1 = 0.0;
    double y2 = 0.0;
    double t = 0.0;

    double level(int i) const { return i == 0 ? y1 : y2; }
};

/// Drain times L_i = y_i / Delta_i. Requires Delta > 0.
std::array<double, 2> drain_times(const FluidState& fs, const DerivedQuantities& d);

/// Closed-form contents at time 0:
///   Z1 = (y1 - t D1 - p21 (t D2 - y2)^+)^+, Z2 symmetric.
std::array<double, 2> fluid_contents(const FluidState& fs, const DerivedQuantities& d);

/// c1 Z1 + c2 Z2 >= x at time 0, evaluated from the closed form.
bool reachability(const FluidState& fs, const DerivedQuantities& d, Direction c, double x);

/// Single-sided start (one level zero): max(c1 (y1 - t(D1 + p21 D2)), c2 (y2 - t(D2 + p12 D1))) > x.
bool corollary_max_form(const FluidState& fs, const DerivedQuantities& d, Direction c, double x);

/// Brute-force forward Euler of the fluid model with input rates alpha on,
/// stepping the shared regime table. dt must not exceed 1e-4 t.
std::array<double, 2> integrate_fluid(const FluidState& fs, const DerivedQuantities& d, double dt);

/// Jump-size thresholds beyond which one batch arriving n*a time units before
/// zero pushes c.Z above x:
///   node 1: x/c1 + n a (D1 + p21 D2), node 2 symmetric; +inf when c_i = 0.
struct BigJumpThreshold {
    int n = 0;
    std::array<double, 2> threshold{};
};

std::vector<BigJumpThreshold> big_jump_thresholds(const DerivedQuantities& d, double a, Direction c, double x,
                                                  int n_max);

struct OracleSuiteOptions {
    std::size_t tuples = 10000;
    /// Euler step as a fraction of the horizon t.
    double relative_step = 1e-4;
    std::uint64_t seed = 20240601;
};

struct OracleSuiteReport {
    std::size_t tuples = 0;
    std::size_t agreements = 0;
    std::size_t disagreements = 0;
    /// disagreements with |c.Z_euler - x| outside the tolerance band
    std::size_t outside_band = 0;
    /// tuples per sub-case: both drain times beyond t, only node 2 empties, only node 1 empties, both empty
    std::array<std::size_t, 4> subcases{};

    double agreement_rate() const { return tuples ? static_cast<double>(agreements) / tuples : 0.0; }
};

/// Randomized comparison of reachability() against integrate_fluid().
OracleSuiteReport run_oracle_suite(const DerivedQuantities& d, const OracleSuiteOptions& opt = {});

}  // namespace fluidnet
