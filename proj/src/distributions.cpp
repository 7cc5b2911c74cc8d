#include "fluidnet/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "quadrature.hpp"

namespace fluidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const boost::math::normal_distribution<double>& std_normal() {
    static const boost::math::normal_distribution<double> n(0.0, 1.0);
    return n;
}

double normal_cdf(double z) { return boost::math::cdf(std_normal(), z); }

// P(ca*A + cb*B > x) for independent A, B and positive scale factors.
double convolution_tail(const HeavyDist& a, double ca, const HeavyDist& b, double cb, double x) {
    const auto scaled_tail = [](const HeavyDist& d, double c, double y) {
        return y < 0.0 ? 1.0 : d.tail(y / c);
    };
    if (a.family() == Family::Deterministic && b.family() == Family::Deterministic)
        return ca * a.param1() + cb * b.param1() > x ? 1.0 : 0.0;
    if (a.family() == Family::Deterministic) return convolution_tail(b, cb, a, ca, x);
    if (b.family() == Family::Deterministic) {
        const double rest = x - cb * b.param1();
        return scaled_tail(a, ca, rest);
    }

    // Integrate over the first coordinate: P(ca A > x) + int f_A(u) P(cb B > x - ca u) du.
    const double lo = a.support_min();
    const double hi = x / ca;
    double total = a.tail(hi);
    if (hi > lo) {
        const auto integrand = [&](double u) {
            return a.density(u) * scaled_tail(b, cb, x - ca * u);
        };
        std::vector<double> breaks;
        // kink where the second coordinate crosses the edge of its support
        breaks.push_back((x - cb * b.support_min()) / ca);
        breaks.push_back(std::max(a.mean(), b.mean()));
        total += detail::integrate_finite(integrand, lo, hi, breaks);
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
    case Family::Pareto: return "pareto";
    case Family::Weibull: return "weibull";
    case Family::Lognormal: return "lognormal";
    case Family::Exponential: return "exponential";
    case Family::Deterministic: return "deterministic";
    }
    return "unknown";
}

// --- HeavyDist -------------------------------------------------------------

HeavyDist::HeavyDist(Family f, double a, double b) : family_(f), a_(a), b_(b), mean_(0.0) {
    switch (f) {
    case Family::Pareto:
        if (!(a > 0.0)) throw std::invalid_argument("pareto scale must be positive");
        if (!(b > 1.0)) throw std::invalid_argument("pareto index must exceed 1 (finite mean)");
        mean_ = a * b / (b - 1.0);
        break;
    case Family::Weibull:
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("weibull scale and shape must be positive");
        mean_ = a * std::tgamma(1.0 + 1.0 / b);
        break;
    case Family::Lognormal:
        if (!std::isfinite(a) || !(b > 0.0)) throw std::invalid_argument("lognormal log_std must be positive");
        mean_ = std::exp(a + 0.5 * b * b);
        break;
    case Family::Exponential:
        if (!(a > 0.0)) throw std::invalid_argument("exponential rate must be positive");
        mean_ = 1.0 / a;
        break;
    case Family::Deterministic:
        if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("deterministic value must be finite and nonnegative");
        mean_ = a;
        break;
    }
    if (!std::isfinite(mean_)) throw std::invalid_argument("distribution mean is not finite");
}

HeavyDist HeavyDist::pareto(double scale, double index) { return {Family::Pareto, scale, index}; }
HeavyDist HeavyDist::weibull(double scale, double shape) { return {Family::Weibull, scale, shape}; }
HeavyDist HeavyDist::lognormal(double log_mean, double log_std) { return {Family::Lognormal, log_mean, log_std}; }
HeavyDist HeavyDist::exponential(double rate) { return {Family::Exponential, rate, 0.0}; }
HeavyDist HeavyDist::deterministic(double value) { return {Family::Deterministic, value, 0.0}; }

double HeavyDist::tail(double x) const {
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("tail: x must be nonnegative");
    switch (family_) {
    case Family::Pareto: return x <= a_ ? 1.0 : std::pow(a_ / x, b_);
    case Family::Weibull: return std::exp(-std::pow(x / a_, b_));
    case Family::Lognormal:
        if (x == 0.0) return 1.0;
        return boost::math::cdf(boost::math::complement(std_normal(), (std::log(x) - a_) / b_));
    case Family::Exponential: return std::exp(-a_ * x);
    case Family::Deterministic: return x < a_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double HeavyDist::density(double x) const {
    if (x < 0.0) return 0.0;
    switch (family_) {
    case Family::Pareto: return x < a_ ? 0.0 : b_ / a_ * std::pow(a_ / x, b_ + 1.0);
    case Family::Weibull:
        if (x == 0.0) return b_ < 1.0 ? kInf : (b_ == 1.0 ? 1.0 / a_ : 0.0);
        return b_ / a_ * std::pow(x / a_, b_ - 1.0) * std::exp(-std::pow(x / a_, b_));
    case Family::Lognormal: {
        if (x == 0.0) return 0.0;
        const double z = (std::log(x) - a_) / b_;
        return std::exp(-0.5 * z * z) / (x * b_ * std::sqrt(2.0 * M_PI));
    }
    case Family::Exponential: return a_ * std::exp(-a_ * x);
    case Family::Deterministic: return 0.0;
    }
    return 0.0;
}

double HeavyDist::tail_quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("tail_quantile: level must lie in (0,1]");
    switch (family_) {
    case Family::Pareto: return a_ * std::pow(q, -1.0 / b_);
    case Family::Weibull: return a_ * std::pow(-std::log(q), 1.0 / b_);
    case Family::Lognormal:
        if (q == 1.0) return 0.0;
        return std::exp(a_ + b_ * boost::math::quantile(boost::math::complement(std_normal(), q)));
    case Family::Exponential: return -std::log(q) / a_;
    case Family::Deterministic: return q < 1.0 ? a_ : 0.0;
    }
    return 0.0;
}

double HeavyDist::sample_size_biased(Rng& rng) const {
    switch (family_) {
    case Family::Pareto: return a_ * std::pow(rng.uniform(), -1.0 / (b_ - 1.0));
    case Family::Weibull: {
        std::gamma_distribution<double> g(1.0 + 1.0 / b_, 1.0);
        return a_ * std::pow(g(rng.engine()), 1.0 / b_);
    }
    case Family::Lognormal:
        return HeavyDist::lognormal(a_ + b_ * b_, b_).sample(rng);
    case Family::Exponential:
        return (-std::log(rng.uniform()) - std::log(rng.uniform())) / a_;
    case Family::Deterministic: return a_;
    }
    return 0.0;
}

double HeavyDist::laplace(double theta) const {
    if (theta > 0.0) throw std::invalid_argument("laplace: theta must be nonpositive");
    if (theta == 0.0) return 1.0;
    if (theta == -kInf) return family_ == Family::Deterministic && a_ == 0.0 ? 1.0 : 0.0;
    switch (family_) {
    case Family::Exponential: return a_ / (a_ - theta);
    case Family::Deterministic: return std::exp(theta * a_);
    default: break;
    }
    // E e^{theta J} = 1 + theta * int_0^inf e^{theta x} P(J > x) dx
    const double s = support_min();
    double integral = s > 0.0 ? std::expm1(theta * s) / theta : 0.0;
    integral += detail::integrate_half_line(
        [&](double x) { return std::exp(theta * x) * tail(x); }, s);
    return 1.0 + theta * integral;
}

bool HeavyDist::subexponential() const {
    switch (family_) {
    case Family::Pareto:
    case Family::Lognormal: return true;
    case Family::Weibull: return b_ < 1.0;
    default: return false;
    }
}

double HeavyDist::support_min() const {
    if (family_ == Family::Pareto) return a_;
    if (family_ == Family::Deterministic) return a_;
    return 0.0;
}

std::string HeavyDist::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
    case Family::Pareto: os << "pareto(scale=" << a_ << ", index=" << b_ << ")"; break;
    case Family::Weibull: os << "weibull(scale=" << a_ << ", shape=" << b_ << ")"; break;
    case Family::Lognormal: os << "lognormal(log_mean=" << a_ << ", log_std=" << b_ << ")"; break;
    case Family::Exponential: os << "exponential(rate=" << a_ << ")"; break;
    case Family::Deterministic: os << "deterministic(value=" << a_ << ")"; break;
    }
    return os.str();
}

// --- IntegratedTailDist ----------------------------------------------------

IntegratedTailDist::IntegratedTailDist(HeavyDist base) : base_(std::move(base)) {
    if (!(base_.mean() > 0.0) || !std::isfinite(base_.mean()))
        throw std::invalid_argument("integrated tail requires a finite positive mean");
}

IntegratedTailDist integrated_tail(const HeavyDist& d) { return IntegratedTailDist(d); }

double IntegratedTailDist::tail(double x) const {
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("tail: x must be nonnegative");
    const double a = base_.param1();
    const double b = base_.param2();
    const double m = base_.mean();
    switch (base_.family()) {
    case Family::Exponential: return std::exp(-a * x);
    case Family::Pareto: return x < a ? 1.0 - x / m : std::pow(a / x, b - 1.0) / b;
    case Family::Deterministic: return std::max(0.0, 1.0 - x / a);
    case Family::Weibull: return boost::math::gamma_q(1.0 / b, std::pow(x / a, b));
    case Family::Lognormal: {
        if (x == 0.0) return 1.0;
        // E(J - x)^+ / m
        const double d2 = (a - std::log(x)) / b;
        const double v = normal_cdf(d2 + b) - x / m * normal_cdf(d2);
        return std::clamp(v, 0.0, 1.0);
    }
    }
    return 0.0;
}

double IntegratedTailDist::tail_quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("tail_quantile: level must lie in (0,1]");
    const double a = base_.param1();
    const double b = base_.param2();
    const double m = base_.mean();
    switch (base_.family()) {
    case Family::Exponential: return -std::log(q) / a;
    case Family::Pareto: return q * b >= 1.0 ? m * (1.0 - q) : a * std::pow(q * b, -1.0 / (b - 1.0));
    case Family::Deterministic: return a * (1.0 - q);
    case Family::Weibull:
    case Family::Lognormal: break;
    }
    return invert_tail_bisection([this](double x) { return tail(x); }, q);
}

double IntegratedTailDist::mean() const {
    // E X^I = E J^2 / (2 m)
    const double a = base_.param1();
    const double b = base_.param2();
    const double m = base_.mean();
    double second = kInf;
    switch (base_.family()) {
    case Family::Exponential: second = 2.0 / (a * a); break;
    case Family::Pareto: second = b > 2.0 ? b * a * a / (b - 2.0) : kInf; break;
    case Family::Deterministic: second = a * a; break;
    case Family::Weibull: second = a * a * std::tgamma(1.0 + 2.0 / b); break;
    case Family::Lognormal: second = std::exp(2.0 * a + 2.0 * b * b); break;
    }
    return second / (2.0 * m);
}

// --- Direction and jump models -----------------------------------------------

Direction::Direction(double a, double b) : c1(a), c2(b) {
    if (!(a >= 0.0) || !(b >= 0.0) || std::abs(a + b - 1.0) > 1e-12)
        throw std::invalid_argument("direction must be nonnegative with unit sum");
}

JumpModel::JumpModel(IndependentJumps j) : law_(std::move(j)) {}

JumpModel::JumpModel(MixtureJumps j) : law_(std::move(j)) {
    const auto& m = std::get<MixtureJumps>(law_);
    if (!(m.p1 > 0.0 && m.p1 < 1.0)) throw std::invalid_argument("mixture weight p1 must lie in (0,1)");
}

const HeavyDist& JumpModel::component(int node) const {
    return std::visit([node](const auto& l) -> const HeavyDist& { return node == 0 ? l.first : l.second; }, law_);
}

double JumpModel::reach_probability(int node) const {
    if (!is_mixture()) return 1.0;
    return node == 0 ? mixture().p1 : mixture().p2();
}

double JumpModel::marginal_mean(int node) const {
    return reach_probability(node) * component(node).mean();
}

double JumpModel::laplace(double theta1, double theta2) const {
    if (is_mixture()) {
        const auto& m = mixture();
        return m.p1 * m.first.laplace(theta1) + m.p2() * m.second.laplace(theta2);
    }
    return independent().first.laplace(theta1) * independent().second.laplace(theta2);
}

std::array<double, 2> JumpModel::sample(Rng& rng) const {
    if (is_mixture()) {
        const auto& m = mixture();
        if (rng.uniform() < m.p1) return {m.first.sample(rng), 0.0};
        return {0.0, m.second.sample(rng)};
    }
    const double j1 = independent().first.sample(rng);
    const double j2 = independent().second.sample(rng);
    return {j1, j2};
}

DirectionalJumpDist::DirectionalJumpDist(JumpModel jumps, Direction c)
    : jumps_(std::move(jumps)), c_(c) {}

double DirectionalJumpDist::mean() const {
    return c_.c1 * jumps_.marginal_mean(0) + c_.c2 * jumps_.marginal_mean(1);
}

double DirectionalJumpDist::tail(double x) const {
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("tail: x must be nonnegative");
    const auto scaled = [x](const HeavyDist& d, double c) { return c > 0.0 ? d.tail(x / c) : 0.0; };
    if (jumps_.is_mixture()) {
        const auto& m = jumps_.mixture();
        return m.p1 * scaled(m.first, c_.c1) + m.p2() * scaled(m.second, c_.c2);
    }
    const auto& ind = jumps_.independent();
    if (c_.c2 == 0.0) return scaled(ind.first, c_.c1);
    if (c_.c1 == 0.0) return scaled(ind.second, c_.c2);
    return convolution_tail(ind.first, c_.c1, ind.second, c_.c2, x);
}

DirectionalIntegratedTail::DirectionalIntegratedTail(DirectionalJumpDist d) : d_(std::move(d)) {
    if (!(d_.mean() > 0.0)) throw std::invalid_argument("integrated tail requires a positive directional mean");
}

double DirectionalIntegratedTail::mean() const { return d_.mean(); }

double DirectionalIntegratedTail::tail(double x) const {
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("tail: x must be nonnegative");
    const auto& c = d_.direction();
    const auto& jumps = d_.jumps();
    const double mc = d_.mean();
    if (jumps.is_mixture() || c.c1 == 0.0 || c.c2 == 0.0) {
        // mixture of scaled component integrated tails, weights c_i m_i / m_c
        double total = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (c[i] == 0.0) continue;
            const double w = c[i] * jumps.marginal_mean(i) / mc;
            total += w * IntegratedTailDist(jumps.component(i)).tail(x / c[i]);
        }
        return std::clamp(total, 0.0, 1.0);
    }
    const double v = detail::integrate_half_line([this](double y) { return d_.tail(y); }, x, 1e-8);
    return std::clamp(v / mc, 0.0, 1.0);
}

double DirectionalIntegratedTail::sample(Rng& rng) const {
    const auto& c = d_.direction();
    const auto& jumps = d_.jumps();
    const double mc = d_.mean();
    const double w1 = c.c1 * jumps.marginal_mean(0) / mc;
    const int pick = rng.uniform() < w1 ? 0 : 1;
    if (jumps.is_mixture() || c.c1 == 0.0 || c.c2 == 0.0)
        return c[pick] * IntegratedTailDist(jumps.component(pick)).sample(rng);
    // Equilibrium law of a sum: U times the size-biased sum, where size-biasing
    // falls on coordinate i with probability c_i m_i / m_c.
    const int other = 1 - pick;
    const double biased = jumps.component(pick).sample_size_biased(rng);
    const double plain = jumps.component(other).sample(rng);
    return rng.uniform() * (c[pick] * biased + c[other] * plain);
}

long geometric_count(double r, Rng& rng) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("geometric parameter must lie in (0,1)");
    return static_cast<long>(std::floor(std::log(rng.uniform()) / std::log(r)));
}

std::vector<std::pair<double, double>> subexponentiality_diagnostic(const HeavyDist& d,
                                                                   const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    double prev = -kInf;
    for (double x : grid) {
        if (!(x >= 0.0) || x <= prev) throw std::invalid_argument("diagnostic grid must be increasing and nonnegative");
        prev = x;
        const double both = convolution_tail(d, 1.0, d, 1.0, x);
        const double single = d.tail(x);
        out.emplace_back(x, single > 0.0 ? both / (2.0 * single) : kInf);
    }
    return out;
}

}  // namespace fluidnet
