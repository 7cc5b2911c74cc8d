#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "fluidnet/distributions.hpp"

namespace fluidnet {

struct PoissonArrivals {
    double rate;
};

/// Renewal arrival stream; intensity is 1 / interarrival mean.
struct RenewalArrivals {
    HeavyDist interarrival;
};

using ArrivalModel = std::variant<PoissonArrivals, RenewalArrivals>;

/// Two-node fluid network with compound batch input. Node indices are 0 and 1
/// throughout the library. Validated on construction.
class NetworkParams {
public:
    NetworkParams(std::array<double, 2> release_rates, double p12, double p21, ArrivalModel arrival,
                  JumpModel jumps);

    const std::array<double, 2>& mu() const { return mu_; }
    double mu(int i) const { return mu_[i]; }
    /// Fraction of node-1 outflow routed to node 2.
    double p12() const { return p12_; }
    /// Fraction of node-2 outflow routed to node 1.
    double p21() const { return p21_; }
    /// Routing fraction from node `from` to the other node.
    double routing(int from) const { return from == 0 ? p12_ : p21_; }
    const ArrivalModel& arrival() const { return arrival_; }
    bool poisson() const { return std::holds_alternative<PoissonArrivals>(arrival_); }
    const JumpModel& jumps() const { return jumps_; }
    double arrival_rate() const;

    NetworkParams with_release_rates(std::array<double, 2> mu) const;

private:
    std::array<double, 2> mu_;
    double p12_;
    double p21_;
    ArrivalModel arrival_;
    JumpModel jumps_;
};

enum class Stability { Unstable, Stable, StronglyStable };

std::string to_string(Stability s);

/// Closed-form scalars of the model. Index i refers to node i.
struct DerivedQuantities {
    std::array<double, 2> mu{};
    double p12 = 0.0;
    double p21 = 0.0;
    double lambda = 0.0;
    /// m_i = E J_i
    std::array<double, 2> jump_mean{};
    /// delta_i = mu_i - mu_{3-i} p_{(3-i)i}: drain rate of node i while both are busy
    std::array<double, 2> drain{};
    /// alpha_i = lambda m_i
    std::array<double, 2> input_rate{};
    /// Delta_i = delta_i - alpha_i
    std::array<double, 2> net_drain{};
    /// Delta_i recomputed as mu_i (1-rho_i) - mu_{3-i} p_{(3-i)i} (1-rho_{3-i})
    std::array<double, 2> net_drain_via_load{};
    /// rho_i: total inflow rate over release rate
    std::array<double, 2> load{};
    /// r_i = alpha_i / delta_i (upper-bound geometric parameter)
    std::array<double, 2> r_upper{};
    /// r'_i = alpha_i / (delta_i + delta_{3-i} p_{(3-i)i}) (lower-bound geometric parameter)
    std::array<double, 2> r_lower{};
    /// Reflection matrix [[1, -p21], [-p12, 1]] and its inverse.
    std::array<std::array<double, 2>, 2> reflection{};
    std::array<std::array<double, 2>, 2> reflection_inverse{};

    double routing(int from) const { return from == 0 ? p12 : p21; }
    /// mu_i (1 - rho_i): total boundary-measure mass of node i.
    double boundary_mass(int i) const { return mu[i] * (1.0 - load[i]); }
    /// Delta_i + p_{(3-i)i} Delta_{3-i}.
    double coupled_net_drain(int i) const { return net_drain[i] + routing(1 - i) * net_drain[1 - i]; }

    friend bool operator==(const DerivedQuantities&, const DerivedQuantities&) = default;
};

DerivedQuantities derive(const NetworkParams& p);

Stability check_stability(const DerivedQuantities& d);

enum class DirectionCase { C0, C1, C2 };

std::string to_string(DirectionCase c);

/// Per-direction constants of the boundary decompositions.
struct DirectionCoefficients {
    Direction c;
    DirectionCase kind = DirectionCase::C0;
    /// m_c = c1 m1 + c2 m2
    double mean = 0.0;
    /// r_c = (c1 a1 + c2 a2) / (c1 d1 + c2 d2)
    double r = 0.0;
    /// r'_c, defined for C1 (and for C2 with indices swapped)
    std::optional<double> r_lower;
    /// eta^(i)_c = (c_i - p_{i(3-i)} c_{3-i}) / (c1 D1 + c2 D2)
    std::array<double, 2> eta{};
    /// d^(1)_c, d^(2)_c for C1 (C2: computed on the swapped network)
    std::optional<std::array<double, 2>> decomposition;
    /// Sign terms c1 - p12 c2 and c2 - p21 c1.
    std::array<double, 2> sign_terms{};
};

/// Assign C0/C1/C2 and compute the direction's constants. Requires strong stability.
DirectionCoefficients classify_direction(const DerivedQuantities& d, Direction c);

/// Reduce an added continuous input (rates beta) to slower release rates.
NetworkParams reduce_continuous_input(const NetworkParams& p, double beta1, double beta2);

/// DerivedQuantities of the mirrored network (node labels exchanged).
DerivedQuantities swap_nodes(const DerivedQuantities& d);

}  // namespace fluidnet
