#include "fluidnet/network.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fluidnet {

NetworkParams::NetworkParams(std::array<double, 2> release_rates, double p12, double p21,
                             ArrivalModel arrival, JumpModel jumps)
    : mu_(release_rates), p12_(p12), p21_(p21), arrival_(std::move(arrival)), jumps_(std::move(jumps)) {
    for (double m : mu_)
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("release rates must be positive and finite");
    if (!(p12 >= 0.0 && p12 < 1.0) || !(p21 >= 0.0 && p21 < 1.0))
        throw std::invalid_argument("routing fractions must lie in [0,1)");
    if (!(p12 * p21 < 1.0) || !(p12 + p21 > 0.0))
        throw std::invalid_argument("routing must satisfy 0 <= p12 p21 < 1 and p12 + p21 > 0");
    const double lambda = arrival_rate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("arrival intensity must be positive and finite");
}

double NetworkParams::arrival_rate() const {
    if (const auto* p = std::get_if<PoissonArrivals>(&arrival_)) return p->rate;
    return 1.0 / std::get<RenewalArrivals>(arrival_).interarrival.mean();
}

NetworkParams NetworkParams::with_release_rates(std::array<double, 2> mu) const {
    return NetworkParams(mu, p12_, p21_, arrival_, jumps_);
}

std::string to_string(Stability s) {
    switch (s) {
    case Stability::Unstable: return "unstable";
    case Stability::Stable: return "stable";
    case Stability::StronglyStable: return "strongly_stable";
    }
    return "unknown";
}

std::string to_string(DirectionCase c) {
    switch (c) {
    case DirectionCase::C0: return "C0";
    case DirectionCase::C1: return "C1";
    case DirectionCase::C2: return "C2";
    }
    return "unknown";
}

DerivedQuantities derive(const NetworkParams& p) {
    DerivedQuantities d;
    d.mu = p.mu();
    d.p12 = p.p12();
    d.p21 = p.p21();
    d.lambda = p.arrival_rate();
    const double feedback = 1.0 - d.p12 * d.p21;
    for (int i = 0; i < 2; ++i) {
        d.jump_mean[i] = p.jumps().marginal_mean(i);
        d.input_rate[i] = d.lambda * d.jump_mean[i];
    }
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        d.drain[i] = d.mu[i] - d.mu[j] * d.routing(j);
        d.net_drain[i] = d.drain[i] - d.input_rate[i];
        d.load[i] = (d.input_rate[i] + d.input_rate[j] * d.routing(j)) / (d.mu[i] * feedback);
    }
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        d.net_drain_via_load[i] = d.mu[i] * (1.0 - d.load[i]) - d.mu[j] * d.routing(j) * (1.0 - d.load[j]);
        d.r_upper[i] = d.input_rate[i] / d.drain[i];
        d.r_lower[i] = d.input_rate[i] / (d.drain[i] + d.drain[j] * d.routing(j));
    }
    d.reflection = {{{1.0, -d.p21}, {-d.p12, 1.0}}};
    d.reflection_inverse = {{{1.0 / feedback, d.p21 / feedback}, {d.p12 / feedback, 1.0 / feedback}}};
    return d;
}

Stability check_stability(const DerivedQuantities& d) {
    const double a = d.net_drain[0];
    const double b = d.net_drain[1];
    if (a > 0.0 && b > 0.0) return Stability::StronglyStable;
    if (a + b * d.p21 > 0.0 && a * d.p12 + b > 0.0) return Stability::Stable;
    return Stability::Unstable;
}

DerivedQuantities swap_nodes(const DerivedQuantities& d) {
    const auto flip = [](std::array<double, 2> v) { return std::array<double, 2>{v[1], v[0]}; };
    DerivedQuantities s = d;
    s.mu = flip(d.mu);
    s.p12 = d.p21;
    s.p21 = d.p12;
    s.jump_mean = flip(d.jump_mean);
    s.drain = flip(d.drain);
    s.input_rate = flip(d.input_rate);
    s.net_drain = flip(d.net_drain);
    s.net_drain_via_load = flip(d.net_drain_via_load);
    s.load = flip(d.load);
    s.r_upper = flip(d.r_upper);
    s.r_lower = flip(d.r_lower);
    s.reflection = {{{1.0, -s.p21}, {-s.p12, 1.0}}};
    s.reflection_inverse = {{{d.reflection_inverse[1][1], d.reflection_inverse[1][0]},
                             {d.reflection_inverse[0][1], d.reflection_inverse[0][0]}}};
    return s;
}

namespace {

// r'_c and d^(1), d^(2) for a direction whose second sign term is negative.
void fill_c1(const DerivedQuantities& d, DirectionCoefficients& out, Direction c) {
    const double denom = c.c1 * (d.drain[0] + d.drain[1] * d.p21);
    const double rl = (c.c1 * d.input_rate[0] + c.c2 * d.input_rate[1]) / denom;
    const double scale = denom * (1.0 - rl);
    const double d1 = (d.drain[0] * (c.c1 - d.p12 * c.c2) + d.drain[1] * (d.p21 * c.c1 - c.c2)) / scale;
    const double d2 = d.drain[1] * (d.p21 * c.c1 - c.c2) / scale;
    out.r_lower = rl;
    out.decomposition = std::array<double, 2>{d1, d2};
}

}  // namespace

DirectionCoefficients classify_direction(const DerivedQuantities& d, Direction c) {
    if (check_stability(d) != Stability::StronglyStable)
        throw std::invalid_argument("direction classification requires strong stability");
    DirectionCoefficients out;
    out.c = c;
    out.sign_terms = {c.c1 - d.p12 * c.c2, c.c2 - d.p21 * c.c1};
    out.mean = c.c1 * d.jump_mean[0] + c.c2 * d.jump_mean[1];
    out.r = (c.c1 * d.input_rate[0] + c.c2 * d.input_rate[1]) / (c.c1 * d.drain[0] + c.c2 * d.drain[1]);
    const double net = c.c1 * d.net_drain[0] + c.c2 * d.net_drain[1];
    out.eta = {out.sign_terms[0] / net, out.sign_terms[1] / net};

    const bool first = out.sign_terms[0] >= 0.0;
    const bool second = out.sign_terms[1] >= 0.0;
    if (first && second) {
        out.kind = DirectionCase::C0;
    } else if (first) {
        out.kind = DirectionCase::C1;
        fill_c1(d, out, c);
    } else if (second) {
        out.kind = DirectionCase::C2;
        fill_c1(swap_nodes(d), out, c.swapped());
    } else {
        assert(false && "both sign terms negative contradicts p12 p21 < 1");
        throw std::logic_error("direction matches no case");
    }
    return out;
}

NetworkParams reduce_continuous_input(const NetworkParams& p, double beta1, double beta2) {
    if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) throw std::invalid_argument("continuous input rates must be nonnegative");
    const std::array<double, 2> beta{beta1, beta2};
    const double feedback = 1.0 - p.p12() * p.p21();
    std::array<double, 2> mu{};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        mu[i] = p.mu(i) * (1.0 - (beta[i] + beta[j] * p.routing(j)) / feedback);
        if (!(mu[i] > 0.0)) throw std::invalid_argument("reduced release rate is not positive");
    }
    return p.with_release_rates(mu);
}

}  // namespace fluidnet
