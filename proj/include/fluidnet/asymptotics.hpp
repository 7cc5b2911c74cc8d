#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluidnet/distributions.hpp"
#include "fluidnet/network.hpp"

namespace fluidnet {

class PathStats;

/// GeomSumExact: Monte Carlo of the geometric compound sums themselves.
/// GeomSumAsymptotic: first-order subexponential asymptote (r/(1-r)) F^I(x).
enum class BoundMode { GeomSumExact, GeomSumAsymptotic };

std::string to_string(BoundMode m);
BoundMode bound_mode_from_string(const std::string& s);

/// Coefficient on the second term of the two-dimensional upper bound.
/// Printed: delta2 * eta^(1)_c. Symmetric: delta2 * eta^(2)_c.
/// Both agree whenever eta^(1)_c = eta^(2)_c.
enum class EtaReading { Printed, Symmetric };

std::string to_string(EtaReading e);
EtaReading eta_reading_from_string(const std::string& s);

struct BoundOptions {
    BoundMode mode = BoundMode::GeomSumExact;
    std::size_t draws = 1'000'000;
    std::uint64_t seed = 1;
    EtaReading eta_reading = EtaReading::Printed;
};

/// Lower/upper envelopes of a stationary tail on a grid.
struct BoundReport {
    Direction c;
    DirectionCase kind = DirectionCase::C1;
    std::vector<double> grid;
    std::vector<double> lower;
    std::vector<double> upper;
    /// Monte Carlo standard errors (zero in asymptotic mode).
    std::vector<double> lower_se;
    std::vector<double> upper_se;
    BoundMode lower_kind = BoundMode::GeomSumExact;
    BoundMode upper_kind = BoundMode::GeomSumExact;
    /// Set where a formula exceeded 1 and was clamped (pre-asymptotic region).
    std::vector<bool> lower_clamped;
    std::vector<bool> upper_clamped;

    // constants used
    double r_upper = 0.0;
    double r_lower = 0.0;
    std::array<double, 2> eta{};
    std::array<double, 2> drain{};
    /// weights in front of the upper-bound terms
    std::array<double, 2> upper_weights{};
    EtaReading eta_reading = EtaReading::Printed;
};

/// Bounds for P(Z_i > x) with geometric parameters r'_i (lower) and r_i (upper)
/// and summands F_i^I. Needs stability and Delta_i > 0 only.
BoundReport theorem41_bounds(const DerivedQuantities& d, const HeavyDist& component, const std::vector<double>& grid,
                             const BoundOptions& opt, int node = 0);

/// Bounds for P(c1 Z1 + c2 Z2 > x) under strong stability.
///   lower: S_c with r_c (C0) or r'_c (C1, C2)
///   upper C0: w1 P(c2 S_2^{I(r2)} + S_c^{I(r_c)} > x) + w2 P(c1 S_1^{I(r1)} + S_c^{I(r_c)} > x)
///   upper C1: delta1 eta1 P(c2 S_2 + S_c > x);  C2 mirrors C1.
BoundReport theorem42_bounds(const DerivedQuantities& d, const DirectionCoefficients& dc, const JumpModel& jumps,
                             const std::vector<double>& grid, const BoundOptions& opt);

/// K = ((1-r_c) m_c r1) / (r_c (1-r1) c1 m1) + r_c/(1-r_c); requires c1 > 0.
double tail_constant_K(const DerivedQuantities& d, const DirectionCoefficients& dc);

/// Exact two-term tail asymptote for one-dimensional mixture jumps:
///   LB(x) = k1 F_1^I(x/c1) + k2 F_2^I(x/c2),
///   k1 = alpha1 / (D1 + p21 D2),  k2 = alpha2 / (D2 + p12 D1),  x/0 = inf.
class ExactAsymptote {
public:
    ExactAsymptote(const DerivedQuantities& d, const MixtureJumps& jumps, Direction c);

    const Direction& direction() const { return c_; }
    const std::array<double, 2>& coefficients() const { return coeff_; }
    /// False when a component's integrated tail is not of a subexponential family.
    bool subexponential() const { return subexponential_; }
    double operator()(double x) const;
    double term(int node, double x) const;

private:
    Direction c_;
    std::array<double, 2> coeff_{};
    std::array<IntegratedTailDist, 2> integrated_;
    bool subexponential_ = true;
};

/// Single-big-jump series sum_{n>=0} p_i P(J_i > x/c_i + n a (D_i + p D_j)) over both nodes.
/// Summation stops once a term falls below `relative_cutoff` times the partial sum;
/// the remainder is enclosed by the two integral bounds of a nonincreasing summand.
struct SeriesResult {
    double partial = 0.0;
    double remainder_lower = 0.0;
    double remainder_upper = 0.0;
    long terms = 0;

    double value() const { return partial + 0.5 * (remainder_lower + remainder_upper); }
    double lower() const { return partial + remainder_lower; }
    double upper() const { return partial + remainder_upper; }
};

SeriesResult big_jump_series(const DerivedQuantities& d, const MixtureJumps& jumps, double a, Direction c, double x,
                             double relative_cutoff = 1e-3);

/// One grid point of a simulated-vs-reference comparison.
struct EquivalencePoint {
    double x = 0.0;
    double simulated = 0.0;
    double halfwidth = 0.0;
    double reference = 0.0;
    double ratio = 0.0;
    bool admissible = false;
};

struct EquivalenceReport {
    std::vector<EquivalencePoint> points;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// No grid point had estimate > 10 halfwidths.
    bool insufficient_resolution = true;

    std::vector<EquivalencePoint> admissible() const;
};

/// Ratios simulated tail / reference on the grid points where the simulated
/// estimate exceeds 10 of its halfwidths.
EquivalenceReport weak_equivalence_report(const PathStats& stats, std::size_t direction,
                                          const std::function<double(double)>& reference);

struct TrendFit {
    double slope = 0.0;
    double intercept = 0.0;
    double fitted_start = 0.0;
    double fitted_end = 0.0;
    std::size_t points = 0;

    /// The fitted line ends closer to 1 than it starts.
    bool toward_one() const { return std::abs(fitted_end - 1.0) < std::abs(fitted_start - 1.0); }
};

/// Least-squares line of ratio against log x over the admissible points with
/// x in [x_max/10, x_max].
TrendFit ratio_trend_last_decade(const EquivalenceReport& rep);

}  // namespace fluidnet
