#pragma once

#include <array>

#include "fluidnet/network.hpp"

namespace fluidnet {

/// Content and regulator derivatives on one linear piece of a fluid path.
struct FlowRates {
    /// dZ_i/dt
    std::array<double, 2> content{};
    /// dY_i/dt = mu_i - (actual outflow of node i)
    std::array<double, 2> regulator{};
};

/// Rates of the fluid network in the regime fixed by which coordinates of `z`
/// are zero, with constant external inflow `external` (zero between jumps of
/// the compound-input model, alpha for the continuous-input fluid model).
/// An empty node releases min(mu_i, inflow_i); a busy node releases mu_i.
FlowRates regime_rates(const DerivedQuantities& d, std::array<double, 2> z, std::array<double, 2> external);

/// Jump-free rates of the compound-input network at state z.
inline FlowRates drift(const DerivedQuantities& d, std::array<double, 2> z) {
    return regime_rates(d, z, {0.0, 0.0});
}

}  // namespace fluidnet
