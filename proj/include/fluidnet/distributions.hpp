#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fluidnet {

/// Raised when a numeric routine (quadrature, root bracketing) fails to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-worker random stream. Uniform draws are built from the raw 64-bit
/// engine output so that results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

enum class Family { Pareto, Weibull, Lognormal, Exponential, Deterministic };

std::string to_string(Family f);

/// Nonnegative jump-size law with finite mean. Immutable after construction.
///
/// Parameterisations:
///   Pareto(scale, index)          P(J > x) = (scale/x)^index on [scale, inf), index > 1
///   Weibull(scale, shape)         P(J > x) = exp(-(x/scale)^shape)
///   Lognormal(log_mean, log_std)  log J ~ Normal(log_mean, log_std^2)
///   Exponential(rate)             P(J > x) = exp(-rate x)
///   Deterministic(value)          J = value
class HeavyDist {
public:
    static HeavyDist pareto(double scale, double index);
    static HeavyDist weibull(double scale, double shape);
    static HeavyDist lognormal(double log_mean, double log_std);
    static HeavyDist exponential(double rate);
    static HeavyDist deterministic(double value);

    Family family() const { return family_; }
    /// First and second constructor parameter, in the order listed above.
    double param1() const { return a_; }
    double param2() const { return b_; }
    double mean() const { return mean_; }

    /// P(J > x); x must be nonnegative.
    double tail(double x) const;
    /// Density of the absolutely continuous part (zero for Deterministic).
    double density(double x) const;
    /// Smallest x with P(J > x) <= q, for q in (0, 1].
    double tail_quantile(double q) const;
    /// Inverse-CDF transform of a uniform level u in (0, 1).
    double sample_at(double u) const { return tail_quantile(1.0 - u); }
    double sample(Rng& rng) const { return sample_at(rng.uniform()); }
    /// Draw from the size-biased law x dF(x) / mean.
    double sample_size_biased(Rng& rng) const;
    /// E exp(theta J) for theta <= 0.
    double laplace(double theta) const;

    /// Subexponential per the standard family results: Pareto, Lognormal and
    /// Weibull with shape < 1.
    bool subexponential() const;
    /// Left end of the support.
    double support_min() const;
    std::string describe() const;

    friend bool operator==(const HeavyDist&, const HeavyDist&) = default;

private:
    HeavyDist(Family f, double a, double b);

    Family family_;
    double a_;
    double b_;
    double mean_;
};

/// Integrated-tail (equilibrium) law F^I of a base distribution:
/// P(X > x) = (1/m) * integral_x^inf P(J > y) dy.
class IntegratedTailDist {
public:
    explicit IntegratedTailDist(HeavyDist base);

    const HeavyDist& base() const { return base_; }
    double normalizer() const { return base_.mean(); }

    double tail(double x) const;
    /// x with tail(x) = q. Closed form where one exists, bracketed bisection
    /// to 1e-10 absolute otherwise.
    double tail_quantile(double q) const;
    double sample_at(double u) const { return tail_quantile(1.0 - u); }
    double sample(Rng& rng) const { return sample_at(rng.uniform()); }
    double mean() const;

private:
    HeavyDist base_;
};

IntegratedTailDist integrated_tail(const HeavyDist& d);

/// Bracketed bisection for a nonincreasing tail function: returns x >= 0 with
/// tail(x) ~= q. Brackets [0, hi] with hi doubled until tail(hi) < q.
template <class Tail>
double invert_tail_bisection(const Tail& tail, double q, double abs_tol = 1e-10,
                             int max_iter = 4000);

/// Unit-sum nonnegative weight vector selecting the linear functional c1 Z1 + c2 Z2.
struct Direction {
    double c1 = 1.0;
    double c2 = 0.0;

    Direction() = default;
    Direction(double a, double b);

    double operator[](int i) const { return i == 0 ? c1 : c2; }
    Direction swapped() const { return Direction(c2, c1); }
    friend bool operator==(const Direction&, const Direction&) = default;
};

/// Independent coordinates: J1 ~ F1, J2 ~ F2.
struct IndependentJumps {
    HeavyDist first;
    HeavyDist second;
};

/// One-dimensional jumps: with probability p1 the jump is (J1, 0), J1 ~ F1,
/// otherwise (0, J2), J2 ~ F2.
struct MixtureJumps {
    double p1;
    HeavyDist first;
    HeavyDist second;

    double p2() const { return 1.0 - p1; }
};

/// Joint law of the batch vector (J1, J2).
class JumpModel {
public:
    JumpModel(IndependentJumps j);
    JumpModel(MixtureJumps j);

    bool is_mixture() const { return std::holds_alternative<MixtureJumps>(law_); }
    const MixtureJumps& mixture() const { return std::get<MixtureJumps>(law_); }
    const IndependentJumps& independent() const { return std::get<IndependentJumps>(law_); }

    /// Component law F_i (for the mixture, the law of J_i given it is nonzero).
    const HeavyDist& component(int node) const;
    /// Probability that a batch reaches node i (1 for independent jumps).
    double reach_probability(int node) const;
    /// E J_i, including the zero mass of the mixture.
    double marginal_mean(int node) const;
    /// E exp(theta1 J1 + theta2 J2) for theta <= 0.
    double laplace(double theta1, double theta2) const;
    std::array<double, 2> sample(Rng& rng) const;

private:
    std::variant<IndependentJumps, MixtureJumps> law_;
};

/// Law of c1 J1 + c2 J2 for a fixed direction.
class DirectionalJumpDist {
public:
    DirectionalJumpDist(JumpModel jumps, Direction c);

    const JumpModel& jumps() const { return jumps_; }
    const Direction& direction() const { return c_; }
    /// m_c = c1 m1 + c2 m2.
    double mean() const;
    /// P(c1 J1 + c2 J2 > x). Mixture: closed form with x/0 = inf. Independent:
    /// adaptive quadrature over one coordinate, relative tolerance 1e-6.
    double tail(double x) const;

private:
    JumpModel jumps_;
    Direction c_;
};

/// Integrated-tail law F^I_c of c1 J1 + c2 J2.
class DirectionalIntegratedTail {
public:
    explicit DirectionalIntegratedTail(DirectionalJumpDist d);

    const DirectionalJumpDist& jump_law() const { return d_; }
    double tail(double x) const;
    double sample(Rng& rng) const;
    double mean() const;

private:
    DirectionalJumpDist d_;
};

/// Geometric compound sum: N with P(N = n) = (1-r) r^n, n >= 0, plus N i.i.d.
/// summands. Summand must expose sample(Rng&) and tail(double).
template <class Summand>
struct GeometricSum {
    double r;
    Summand summand;

    GeometricSum(double ratio, Summand s) : r(ratio), summand(std::move(s)) {
        if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("geometric parameter must lie in (0,1)");
    }
};

/// Draw N from P(N = n) = (1-r) r^n by inversion of P(N >= n) = r^n.
long geometric_count(double r, Rng& rng);

template <class Summand>
double geometric_sum_sample(const GeometricSum<Summand>& g, Rng& rng) {
    const long n = geometric_count(g.r, rng);
    double s = 0.0;
    for (long k = 0; k < n; ++k) s += g.summand.sample(rng);
    return s;
}

/// First-order subexponential asymptote (r/(1-r)) * summand tail.
template <class Summand>
double geometric_sum_tail_asymptotic(const GeometricSum<Summand>& g, double x) {
    if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
    return g.r / (1.0 - g.r) * g.summand.tail(x);
}

/// Ratio P(X1 + X2 > x) / (2 P(X > x)) at each grid point.
std::vector<std::pair<double, double>> subexponentiality_diagnostic(const HeavyDist& d,
                                                                   const std::vector<double>& grid);

// --- template definitions -------------------------------------------------

template <class Tail>
double invert_tail_bisection(const Tail& tail, double q, double abs_tol, int max_iter) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("tail level must lie in (0,1]");
    if (tail(0.0) <= q) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    int iter = 0;
    while (tail(hi) >= q) {
        lo = hi;
        hi *= 2.0;
        if (++iter > max_iter) throw NumericError("tail inversion: bracket expansion failed");
    }
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (tail(mid) >= q) lo = mid;
        else hi = mid;
        if (++iter > max_iter) throw NumericError("tail inversion: bisection did not converge");
    }
    return 0.5 * (lo + hi);
}

}  // namespace fluidnet
