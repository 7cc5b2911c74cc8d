#include "fluidnet/asymptotics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "fluidnet/fluid_oracle.hpp"
#include "fluidnet/simulator.hpp"

namespace fluidnet {

namespace {

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finaliser over (base, stream)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct TailCurve {
    std::vector<double> value;
    std::vector<double> se;
};

// Empirical P(S > x) on the grid from sorted draws.
TailCurve empirical_tail(std::vector<double> draws, const std::vector<double>& grid) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    TailCurve out;
    for (double x : grid) {
        const auto above = draws.end() - std::upper_bound(draws.begin(), draws.end(), x);
        const double p = static_cast<double>(above) / n;
        out.value.push_back(p);
        out.se.push_back(std::sqrt(p * (1.0 - p) / n));
    }
    return out;
}

template <class Summand>
std::vector<double> geometric_draws(double r, const Summand& summand, std::size_t n, std::uint64_t seed) {
    const GeometricSum<Summand> g(r, summand);
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = geometric_sum_sample(g, rng);
    return out;
}

double clamp_unit(double v, bool& flag) {
    flag = v > 1.0;
    return std::min(v, 1.0);
}

void check_grid(const std::vector<double>& grid) {
    for (double x : grid)
        if (!(x >= 0.0)) throw std::invalid_argument("bound grid must be nonnegative");
}

}  // namespace

std::string to_string(BoundMode m) {
    return m == BoundMode::GeomSumExact ? "exact" : "asymptotic";
}

BoundMode bound_mode_from_string(const std::string& s) {
    if (s == "exact") return BoundMode::GeomSumExact;
    if (s == "asymptotic") return BoundMode::GeomSumAsymptotic;
    throw std::invalid_argument("unknown bound mode '" + s + "' (expected exact|asymptotic)");
}

std::string to_string(EtaReading e) { return e == EtaReading::Printed ? "printed" : "symmetric"; }

EtaReading eta_reading_from_string(const std::string& s) {
    if (s == "printed") return EtaReading::Printed;
    if (s == "symmetric") return EtaReading::Symmetric;
    throw std::invalid_argument("unknown eta reading '" + s + "' (expected printed|symmetric)");
}

BoundReport theorem41_bounds(const DerivedQuantities& d, const HeavyDist& component, const std::vector<double>& grid,
                             const BoundOptions& opt, int node) {
    if (node != 0 && node != 1) throw std::invalid_argument("node must be 0 or 1");
    if (check_stability(d) == Stability::Unstable) throw std::invalid_argument("system is unstable");
    if (!(d.net_drain[node] > 0.0)) throw std::invalid_argument("single-node bounds need a positive net drain");
    check_grid(grid);

    BoundReport rep;
    rep.c = node == 0 ? Direction(1.0, 0.0) : Direction(0.0, 1.0);
    rep.kind = node == 0 ? DirectionCase::C1 : DirectionCase::C2;
    rep.grid = grid;
    rep.r_upper = d.r_upper[node];
    rep.r_lower = d.r_lower[node];
    rep.drain = d.drain;
    rep.lower_kind = rep.upper_kind = opt.mode;
    rep.lower_clamped.assign(grid.size(), false);
    rep.upper_clamped.assign(grid.size(), false);

    const IntegratedTailDist summand = integrated_tail(component);
    if (opt.mode == BoundMode::GeomSumExact) {
        if (opt.draws < 2) throw std::invalid_argument("need at least two Monte Carlo draws");
        auto lo = empirical_tail(geometric_draws(rep.r_lower, summand, opt.draws, stream_seed(opt.seed, 0)), grid);
        auto hi = empirical_tail(geometric_draws(rep.r_upper, summand, opt.draws, stream_seed(opt.seed, 1)), grid);
        rep.lower = std::move(lo.value);
        rep.lower_se = std::move(lo.se);
        rep.upper = std::move(hi.value);
        rep.upper_se = std::move(hi.se);
    } else {
        const GeometricSum<IntegratedTailDist> glo(rep.r_lower, summand), ghi(rep.r_upper, summand);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            bool f = false;
            rep.lower.push_back(clamp_unit(geometric_sum_tail_asymptotic(glo, grid[k]), f));
            rep.lower_clamped[k] = f;
            rep.upper.push_back(clamp_unit(geometric_sum_tail_asymptotic(ghi, grid[k]), f));
            rep.upper_clamped[k] = f;
        }
        rep.lower_se.assign(grid.size(), 0.0);
        rep.upper_se.assign(grid.size(), 0.0);
    }
    return rep;
}

BoundReport theorem42_bounds(const DerivedQuantities& d, const DirectionCoefficients& dc, const JumpModel& jumps,
                             const std::vector<double>& grid, const BoundOptions& opt) {
    if (check_stability(d) != Stability::StronglyStable)
        throw std::invalid_argument("directional bounds require strong stability");
    check_grid(grid);
    const DirectionCoefficients fresh = classify_direction(d, dc.c);
    if (fresh.kind != dc.kind) throw std::invalid_argument("direction coefficients do not match the direction's case");
    const Direction& c = dc.c;

    BoundReport rep;
    rep.c = c;
    rep.kind = dc.kind;
    rep.grid = grid;
    rep.eta = dc.eta;
    rep.drain = d.drain;
    rep.eta_reading = opt.eta_reading;
    rep.r_upper = dc.r;
    rep.r_lower = dc.kind == DirectionCase::C0 ? dc.r : dc.r_lower.value();
    rep.lower_kind = rep.upper_kind = opt.mode;
    rep.lower_clamped.assign(grid.size(), false);
    rep.upper_clamped.assign(grid.size(), false);

    // term 0: P(c2 S_2^{I(r2)} + S_c > x), term 1: P(c1 S_1^{I(r1)} + S_c > x)
    switch (dc.kind) {
    case DirectionCase::C0:
        rep.upper_weights = {d.drain[0] * dc.eta[0],
                             d.drain[1] * (opt.eta_reading == EtaReading::Printed ? dc.eta[0] : dc.eta[1])};
        break;
    case DirectionCase::C1: rep.upper_weights = {d.drain[0] * dc.eta[0], 0.0}; break;
    case DirectionCase::C2: rep.upper_weights = {0.0, d.drain[1] * dc.eta[1]}; break;
    }

    const DirectionalIntegratedTail sc{DirectionalJumpDist(jumps, c)};
    const std::array<IntegratedTailDist, 2> node_it{integrated_tail(jumps.component(0)),
                                                    integrated_tail(jumps.component(1))};
    const std::size_t n = grid.size();

    if (opt.mode == BoundMode::GeomSumExact) {
        if (opt.draws < 2) throw std::invalid_argument("need at least two Monte Carlo draws");
        const auto lower_draws = geometric_draws(rep.r_lower, sc, opt.draws, stream_seed(opt.seed, 10));
        auto lo = empirical_tail(lower_draws, grid);
        rep.lower = std::move(lo.value);
        rep.lower_se = std::move(lo.se);

        rep.upper.assign(n, 0.0);
        rep.upper_se.assign(n, 0.0);
        std::vector<double> var(n, 0.0);
        for (int term = 0; term < 2; ++term) {
            const double w = rep.upper_weights[term];
            if (w == 0.0) continue;
            const int other = 1 - term;  // node whose single-node sum enters
            auto base = geometric_draws(dc.r, sc, opt.draws, stream_seed(opt.seed, 20 + term));
            if (c[other] > 0.0) {
                const auto extra =
                    geometric_draws(d.r_upper[other], node_it[other], opt.draws, stream_seed(opt.seed, 30 + term));
                for (std::size_t k = 0; k < base.size(); ++k) base[k] += c[other] * extra[k];
            }
            const auto t = empirical_tail(std::move(base), grid);
            for (std::size_t k = 0; k < n; ++k) {
                rep.upper[k] += w * t.value[k];
                var[k] += w * w * t.se[k] * t.se[k];
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            rep.upper_se[k] = std::sqrt(var[k]);
            bool f = false;
            rep.upper[k] = clamp_unit(rep.upper[k], f);
            rep.upper_clamped[k] = f;
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const double x = grid[k];
            const double sc_tail = sc.tail(x);
            bool f = false;
            rep.lower.push_back(clamp_unit(rep.r_lower / (1.0 - rep.r_lower) * sc_tail, f));
            rep.lower_clamped[k] = f;
            double u = 0.0;
            for (int term = 0; term < 2; ++term) {
                const double w = rep.upper_weights[term];
                if (w == 0.0) continue;
                const int other = 1 - term;
                double v = dc.r / (1.0 - dc.r) * sc_tail;
                if (c[other] > 0.0) {
                    const double ro = d.r_upper[other];
                    v += ro / (1.0 - ro) * node_it[other].tail(x / c[other]);
                }
                u += w * v;
            }
            rep.upper.push_back(clamp_unit(u, f));
            rep.upper_clamped[k] = f;
        }
        rep.lower_se.assign(n, 0.0);
        rep.upper_se.assign(n, 0.0);
    }
    return rep;
}

double tail_constant_K(const DerivedQuantities& d, const DirectionCoefficients& dc) {
    if (!(dc.c.c1 > 0.0)) throw std::invalid_argument("K needs c1 > 0");
    const double rc = dc.r;
    const double r1 = d.r_upper[0];
    return (1.0 - rc) * dc.mean * r1 / (rc * (1.0 - r1) * dc.c.c1 * d.jump_mean[0]) + rc / (1.0 - rc);
}

ExactAsymptote::ExactAsymptote(const DerivedQuantities& d, const MixtureJumps& jumps, Direction c)
    : c_(c), integrated_{integrated_tail(jumps.first), integrated_tail(jumps.second)} {
    if (check_stability(d) != Stability::StronglyStable)
        throw std::invalid_argument("exact asymptote requires strong stability");
    for (int i = 0; i < 2; ++i) {
        coeff_[i] = d.input_rate[i] / d.coupled_net_drain(i);
        if (c[i] > 0.0 && !integrated_[i].base().subexponential()) subexponential_ = false;
    }
}

double ExactAsymptote::term(int node, double x) const {
    if (x < 0.0) throw std::invalid_argument("x must be nonnegative");
    if (c_[node] == 0.0) return 0.0;
    return coeff_[node] * integrated_[node].tail(x / c_[node]);
}

double ExactAsymptote::operator()(double x) const { return term(0, x) + term(1, x); }

SeriesResult big_jump_series(const DerivedQuantities& d, const MixtureJumps& jumps, double a, Direction c, double x,
                             double relative_cutoff) {
    if (!(relative_cutoff > 0.0 && relative_cutoff < 1.0)) throw std::invalid_argument("cutoff must lie in (0,1)");
    constexpr int kChunk = 4096;
    constexpr long kMaxTerms = 100'000'000;
    SeriesResult out;
    const std::array<double, 2> weight{jumps.p1, jumps.p2()};
    const std::array<const HeavyDist*, 2> law{&jumps.first, &jumps.second};
    for (int i = 0; i < 2; ++i) {
        if (c[i] == 0.0) continue;
        const double step = a * d.coupled_net_drain(i);
        double partial = 0.0;
        long n = 0;
        bool done = false;
        while (!done) {
            // thresholds x/c_i + n a (D_i + p D_j) for n in [n, n + kChunk]
            const auto th = big_jump_thresholds(d, a, c, x, static_cast<int>(n + kChunk));
            for (; n <= static_cast<long>(th.size()) - 1; ++n) {
                const double term = weight[i] * law[i]->tail(th[static_cast<std::size_t>(n)].threshold[i]);
                partial += term;
                ++out.terms;
                if ((n >= 1 && term < relative_cutoff * partial) || term == 0.0) {
                    done = true;
                    break;
                }
            }
            if (n >= kMaxTerms) throw NumericError("big-jump series did not reach its cutoff");
        }
        // sum_{k > n} f(k) lies between int_{n+1}^inf f and int_n^inf f
        const IntegratedTailDist it = integrated_tail(*law[i]);
        const double scale = weight[i] * law[i]->mean() / step;
        out.remainder_lower += scale * it.tail(x / c[i] + static_cast<double>(n + 1) * step);
        out.remainder_upper += scale * it.tail(x / c[i] + static_cast<double>(n) * step);
        out.partial += partial;
    }
    return out;
}

std::vector<EquivalencePoint> EquivalenceReport::admissible() const {
    std::vector<EquivalencePoint> out;
    for (const auto& p : points)
        if (p.admissible) out.push_back(p);
    return out;
}

EquivalenceReport weak_equivalence_report(const PathStats& stats, std::size_t direction,
                                          const std::function<double(double)>& reference) {
    if (direction >= stats.directions().size()) throw std::out_of_range("direction index out of range");
    EquivalenceReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = -std::numeric_limits<double>::infinity();
    const auto& grid = stats.grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Estimate e = stats.tail(direction, k);
        EquivalencePoint p;
        p.x = grid[k];
        p.simulated = e.value;
        p.halfwidth = e.halfwidth;
        p.reference = reference(grid[k]);
        p.ratio = p.reference > 0.0 ? p.simulated / p.reference : std::numeric_limits<double>::infinity();
        p.admissible = e.value > 10.0 * e.halfwidth && e.value > 0.0 && p.reference > 0.0;
        if (p.admissible) {
            rep.insufficient_resolution = false;
            rep.min_ratio = std::min(rep.min_ratio, p.ratio);
            rep.max_ratio = std::max(rep.max_ratio, p.ratio);
        }
        rep.points.push_back(p);
    }
    if (rep.insufficient_resolution) rep.min_ratio = rep.max_ratio = 0.0;
    return rep;
}

TrendFit ratio_trend_last_decade(const EquivalenceReport& rep) {
    const auto adm = rep.admissible();
    TrendFit fit;
    if (adm.empty()) return fit;
    double x_max = 0.0;
    for (const auto& p : adm) x_max = std::max(x_max, p.x);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : adm)
        if (p.x >= x_max / 10.0 && p.x > 0.0) pts.emplace_back(std::log(p.x), p.ratio);
    fit.points = pts.size();
    if (pts.empty()) return fit;
    double mx = 0.0, my = 0.0;
    for (const auto& [u, v] : pts) {
        mx += u;
        my += v;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [u, v] : pts) {
        sxy += (u - mx) * (v - my);
        sxx += (u - mx) * (u - mx);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.fitted_start = fit.intercept + fit.slope * pts.front().first;
    fit.fitted_end = fit.intercept + fit.slope * pts.back().first;
    return fit;
}

}  // namespace fluidnet
