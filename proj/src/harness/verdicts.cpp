#include "fluidnet/verdicts.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "quadrature.hpp"

namespace fluidnet {

namespace {

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

Verdict make(int criterion, std::string name, bool invariant = false) {
    Verdict v;
    v.criterion = criterion;
    v.name = std::move(name);
    v.invariant = invariant;
    return v;
}

void set(Verdict& v, bool ok, std::string measured, std::string detail = {}) {
    v.status = ok ? VerdictStatus::Pass : VerdictStatus::Fail;
    v.measured = std::move(measured);
    v.detail = std::move(detail);
}

// Values computed from the same path are equal up to rounding; allow for it.
constexpr double kRoundingSlack = 1e-12;

double tail_integral(const HeavyDist& d) {
    const double s = d.support_min();
    const auto f = [&](double x) { return d.tail(x); };
    double v = detail::integrate_finite(f, 0.0, s);
    if (d.family() != Family::Deterministic) v += detail::integrate_half_line(f, s, 1e-12);
    return v;
}

}  // namespace

std::string to_string(VerdictStatus s) {
    switch (s) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::Insufficient: return "INSUFFICIENT";
    }
    return "?";
}

std::string Verdict::line() const {
    std::ostringstream os;
    os << "[" << to_string(status) << "] criterion " << criterion << ": " << name;
    if (!measured.empty()) os << " | " << measured;
    if (!detail.empty()) os << " | " << detail;
    return os.str();
}

Verdict check_reflection(const InvariantReport& inv) {
    Verdict v = make(1, "reflection identity residual < 1e-9", true);
    set(v, inv.max_reflection_residual < 1e-9 && inv.epochs > 0,
        "max residual " + fmt(inv.max_reflection_residual, 3) + " over " + std::to_string(inv.epochs) + " epochs",
        "complementarity mass " + fmt(inv.complementarity_mass, 3) + ", min content " + fmt(inv.min_content, 3));
    return v;
}

Verdict check_dominance(const InvariantReport& inv, bool tracked, std::size_t seeds) {
    Verdict v = make(2, "majorant dominance at every epoch", true);
    if (!tracked) {
        v.status = VerdictStatus::Insufficient;
        v.detail = "majorant not tracked";
        return v;
    }
    set(v, inv.dominance_violations == 0 && inv.epochs > 0,
        std::to_string(inv.dominance_violations) + " violations over " + std::to_string(inv.epochs) + " epochs, " +
            std::to_string(seeds) + " seeds",
        "max(Z - majorant) " + fmt(inv.max_dominance_gap, 3));
    return v;
}

Verdict check_regulator_rates(const PathStats& stats, const DerivedQuantities& d) {
    Verdict v = make(3, "regulator rates match mu_i (1 - rho_i)");
    bool ok = true;
    std::ostringstream m;
    for (int i = 0; i < 2; ++i) {
        const Estimate e = stats.regulator_rate(i);
        const double target = d.boundary_mass(i);
        const double dev = std::abs(e.value - target);
        const double rel = e.halfwidth / e.value;
        ok = ok && dev <= 3.0 * e.halfwidth && rel < 0.01;
        m << "node " << i + 1 << ": " << fmt(e.value, 6) << " vs " << fmt(target, 6) << " (|dev|/hw "
          << fmt(dev / e.halfwidth, 3) << ", hw/value " << fmt(rel, 3) << ") ";
    }
    set(v, ok, m.str());
    return v;
}

Verdict check_palm_identities(const PathStats& stats, const DerivedQuantities& d) {
    Verdict v = make(4, "boundary-measure atom and tail identities");
    bool ok = true;
    std::ostringstream m;
    const Estimate empty = stats.empty_fraction();
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        const Estimate atom = stats.palm_atom_rate(i);
        const double diff = std::abs(atom.value - d.mu[i] * empty.value);
        const double hw = std::hypot(atom.halfwidth, d.mu[i] * empty.halfwidth);
        ok = ok && diff <= 3.0 * hw + kRoundingSlack;
        worst = std::max(worst, hw > 0.0 ? diff / hw : 0.0);
    }
    m << "atom max |diff|/hw " << fmt(worst, 3) << "; ";

    std::size_t checked = 0;
    double worst_tail = 0.0;
    const auto& grid = stats.grid();
    for (int i = 0; i < 2; ++i) {
        const int o = 1 - i;
        std::vector<std::size_t> eligible;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (stats.palm_tail(i, k).value > 1e-3 && d.drain[i] * stats.boundary_joint(o, k).value > 1e-3)
                eligible.push_back(k);
        // spread up to 10 points over the eligible range
        std::vector<std::size_t> pick;
        const std::size_t n = std::min<std::size_t>(10, eligible.size());
        for (std::size_t j = 0; j < n; ++j)
            pick.push_back(eligible[n == 1 ? 0 : j * (eligible.size() - 1) / (n - 1)]);
        for (std::size_t k : pick) {
            const Estimate a = stats.palm_tail(i, k);
            const Estimate b = stats.boundary_joint(o, k);
            const double diff = std::abs(a.value - d.drain[i] * b.value);
            const double hw = std::hypot(a.halfwidth, d.drain[i] * b.halfwidth);
            ok = ok && diff <= 3.0 * hw + kRoundingSlack;
            worst_tail = std::max(worst_tail, hw > 0.0 ? diff / hw : 0.0);
            ++checked;
        }
    }
    m << "tail relation on " << checked << " points, max |diff|/hw " << fmt(worst_tail, 3);
    if (checked == 0) {
        v.status = VerdictStatus::Insufficient;
        v.measured = m.str();
        v.detail = "no grid point with boundary estimates above 1e-3";
        return v;
    }
    set(v, ok, m.str());
    return v;
}

Verdict check_balance(const PathStats& stats, const DerivedQuantities& d, const JumpModel& jumps) {
    Verdict v = make(5, "stationary balance residual within 3 standard errors");
    if (!stats.poisson() || stats.thetas().empty()) {
        v.status = VerdictStatus::Insufficient;
        v.detail = stats.poisson() ? "no MGF arguments recorded" : "renewal arrivals: balance equation not applicable";
        return v;
    }
    bool ok = true;
    std::ostringstream m;
    for (const auto& th : stats.thetas()) {
        const Estimate e = balance_residual(stats, d, jumps, th);
        ok = ok && e.value <= 3.0 * e.std_error;
        m << "(" << th[0] << "," << th[1] << "): " << fmt(e.value, 3) << " <= 3*" << fmt(e.std_error, 3) << "; ";
    }
    set(v, ok, m.str());
    return v;
}

Verdict check_sandwich(const PathStats& stats, const DerivedQuantities& d, const JumpModel& jumps,
                       const std::vector<Direction>& directions, const BoundCheckOptions& opt,
                       std::vector<BoundReport>* reports) {
    Verdict v = make(6, "simulated tails inside exact-mode geometric-sum bounds");
    const auto& grid = stats.grid();
    bool ok = true;
    std::size_t points = 0;
    double worst_low = std::numeric_limits<double>::infinity();
    double worst_high = std::numeric_limits<double>::infinity();
    std::ostringstream m;

    const auto examine = [&](const BoundReport& rep, std::size_t dir, const std::string& label) {
        std::size_t bad = 0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Estimate e = stats.tail(dir, k);
            if (!(e.value > 1e-4)) continue;
            ++points;
            const double ci_low = std::hypot(e.halfwidth, 1.96 * rep.lower_se[k]);
            const double ci_high = std::hypot(e.halfwidth, 1.96 * rep.upper_se[k]);
            const double m_low = (e.value - (rep.lower[k] - 3.0 * ci_low));
            const double m_high = (rep.upper[k] + 3.0 * ci_high) - e.value;
            worst_low = std::min(worst_low, m_low);
            worst_high = std::min(worst_high, m_high);
            if (m_low < 0.0 || m_high < 0.0) ++bad;
        }
        if (bad) ok = false;
        m << label << " " << bad << " outside; ";
        if (reports) reports->push_back(rep);
    };

    for (const Direction& c : directions) {
        const auto dir = stats.direction_index(c);
        if (!dir) {
            ok = false;
            m << "direction (" << c.c1 << "," << c.c2 << ") not simulated; ";
            continue;
        }
        BoundOptions bo;
        bo.mode = BoundMode::GeomSumExact;
        bo.draws = opt.draws;
        bo.seed = opt.seed;
        if (c.c2 == 0.0 || c.c1 == 0.0) {
            const int node = c.c1 == 1.0 ? 0 : 1;
            examine(theorem41_bounds(d, jumps.component(node), grid, bo, node), *dir,
                    "Z" + std::to_string(node + 1));
            continue;
        }
        const DirectionCoefficients dc = classify_direction(d, c);
        std::ostringstream label;
        label << to_string(dc.kind) << "(" << c.c1 << "," << c.c2 << ")";
        if (dc.kind == DirectionCase::C0) {
            for (EtaReading reading : {EtaReading::Printed, EtaReading::Symmetric}) {
                bo.eta_reading = reading;
                examine(theorem42_bounds(d, dc, jumps, grid, bo), *dir, label.str() + "/" + to_string(reading));
            }
        } else {
            examine(theorem42_bounds(d, dc, jumps, grid, bo), *dir, label.str());
        }
    }
    m << points << " point checks, min lower margin " << fmt(worst_low, 3) << ", min upper margin "
      << fmt(worst_high, 3);
    if (points == 0) {
        v.status = VerdictStatus::Insufficient;
        v.measured = m.str();
        return v;
    }
    set(v, ok, m.str());
    return v;
}

Verdict check_mg1_oracle(const PathStats& stats, const DerivedQuantities& d, const JumpModel& jumps,
                         const BoundCheckOptions& opt) {
    Verdict v = make(7, "majorant tail agrees with the Pollaczek-Khinchine geometric sum");
    if (!stats.majorant_tracked()) {
        v.status = VerdictStatus::Insufficient;
        v.detail = "majorant not tracked";
        return v;
    }
    const auto& grid = stats.grid();
    BoundOptions bo;
    bo.draws = opt.draws;
    bo.seed = opt.seed + 1;
    // the upper envelope of the single-node report is exactly the r_1 geometric sum
    const BoundReport rep = theorem41_bounds(d, jumps.component(0), grid, bo, 0);
    bool ok = true;
    std::size_t points = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Estimate e = stats.majorant_tail(0, k);
        if (!(e.value > 10.0 * e.halfwidth && e.value > 0.0)) continue;
        ++points;
        const double se = std::hypot(e.std_error, rep.upper_se[k]);
        const double z = std::abs(e.value - rep.upper[k]) / se;
        worst = std::max(worst, z);
        if (z > 3.0) ok = false;
    }
    const std::string measured = std::to_string(points) + " admissible points, max |diff|/SE " + fmt(worst, 3) +
                                 " (r1 = " + fmt(d.r_upper[0], 6) + ")";
    if (points == 0) {
        v.status = VerdictStatus::Insufficient;
        v.measured = measured;
        return v;
    }
    set(v, ok, measured);
    return v;
}

Verdict check_exact_trend(const PathStats& stats, const DerivedQuantities& d, const MixtureJumps& jumps,
                          Direction c) {
    Verdict v = make(8, "exact asymptote ratio over the last admissible decade");
    const auto dir = stats.direction_index(c);
    if (!dir) {
        v.status = VerdictStatus::Insufficient;
        v.detail = "direction not simulated";
        return v;
    }
    const ExactAsymptote lb(d, jumps, c);
    const EquivalenceReport rep = weak_equivalence_report(stats, *dir, [&](double x) { return lb(x); });
    if (rep.insufficient_resolution) {
        v.status = VerdictStatus::Insufficient;
        v.detail = "insufficient tail resolution";
        return v;
    }
    const TrendFit fit = ratio_trend_last_decade(rep);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double x_max = 0.0;
    for (const auto& p : rep.admissible()) x_max = std::max(x_max, p.x);
    for (const auto& p : rep.admissible())
        if (p.x >= x_max / 10.0) {
            lo = std::min(lo, p.ratio);
            hi = std::max(hi, p.ratio);
        }
    std::ostringstream m;
    m << fit.points << " points in [" << fmt(x_max / 10.0) << ", " << fmt(x_max) << "], ratio range [" << fmt(lo)
      << ", " << fmt(hi) << "], fitted " << fmt(fit.fitted_start) << " -> " << fmt(fit.fitted_end);
    const bool in_band = lo >= 0.7 && hi <= 1.3;
    set(v, in_band && fit.toward_one() && fit.points >= 2, m.str(),
        "coefficient " + fmt(lb.coefficients()[0], 6) + (lb.subexponential() ? "" : ", non-subexponential component"));
    return v;
}

Verdict check_fluid_oracle(const DerivedQuantities& d, const OracleSuiteOptions& opt) {
    Verdict v = make(9, "fluid reachability closed form vs Euler integration");
    const OracleSuiteReport r = run_oracle_suite(d, opt);
    std::ostringstream m;
    m << r.agreements << "/" << r.tuples << " agree (" << fmt(100.0 * r.agreement_rate(), 6) << "%), "
      << r.outside_band << " disagreements outside the boundary band; sub-cases " << r.subcases[0] << "/"
      << r.subcases[1] << "/" << r.subcases[2] << "/" << r.subcases[3];
    set(v, r.agreement_rate() >= 0.999 && r.outside_band == 0 && r.tuples >= 10000, m.str());
    return v;
}

Verdict check_series_integral(const DerivedQuantities& d, const MixtureJumps& jumps, double a, double x) {
    Verdict v = make(10, "single-big-jump series vs integral form within 5%");
    bool ok = true;
    std::ostringstream m;
    for (Direction c : {Direction(1.0, 0.0), Direction(0.5, 0.5)}) {
        const SeriesResult s = big_jump_series(d, jumps, a, c, x);
        // the integral form with arrival rate 1/a
        double integral = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (c[i] == 0.0) continue;
            const HeavyDist& f = i == 0 ? jumps.first : jumps.second;
            const double alpha = (i == 0 ? jumps.p1 : jumps.p2()) * f.mean() / a;
            integral += alpha / d.coupled_net_drain(i) * integrated_tail(f).tail(x / c[i]);
        }
        const double rel = std::abs(s.value() - integral) / integral;
        ok = ok && rel < 0.05;
        m << "c=(" << c.c1 << "," << c.c2 << "): series " << fmt(s.value(), 6) << " [" << fmt(s.lower(), 6) << ", "
          << fmt(s.upper(), 6) << "], " << s.terms << " terms, integral " << fmt(integral, 6) << ", rel "
          << fmt(rel, 3) << "; ";
    }
    set(v, ok, m.str());
    return v;
}

Verdict check_distribution_kernel(std::uint64_t seed) {
    Verdict v = make(11, "distribution kernel: mean identity, Wald, subexponentiality");
    bool ok = true;
    std::ostringstream m;

    double worst_mean = 0.0;
    for (const HeavyDist& d : {HeavyDist::pareto(1.0, 2.5), HeavyDist::pareto(2.0, 3.0), HeavyDist::weibull(1.0, 0.5),
                               HeavyDist::weibull(2.0, 1.5), HeavyDist::lognormal(0.0, 1.0),
                               HeavyDist::exponential(2.0), HeavyDist::deterministic(1.5)}) {
        const double rel = std::abs(d.mean() - tail_integral(d)) / d.mean();
        worst_mean = std::max(worst_mean, rel);
    }
    ok = ok && worst_mean < 1e-6;
    m << "max |mean - int tail|/mean " << fmt(worst_mean, 3) << "; ";

    Rng rng(seed);
    const std::size_t n = 1'000'000;
    for (const HeavyDist& base : {HeavyDist::deterministic(1.0), HeavyDist::exponential(1.0)}) {
        const GeometricSum<IntegratedTailDist> g(0.5, integrated_tail(base));
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = geometric_sum_sample(g, rng);
            s1 += x;
            s2 += x * x;
        }
        const double mean = s1 / n;
        const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
        const double expect = g.r / (1.0 - g.r) * g.summand.mean();
        const double z = std::abs(mean - expect) / se;
        ok = ok && z <= 3.0;
        m << "Wald " << base.describe() << " |dev|/SE " << fmt(z, 3) << "; ";
    }

    const double exp_ratio = subexponentiality_diagnostic(HeavyDist::exponential(1.0), {20.0})[0].second;
    const double par_ratio = subexponentiality_diagnostic(HeavyDist::pareto(1.0, 2.0), {100.0})[0].second;
    const double ref_ratio = subexponentiality_diagnostic(HeavyDist::pareto(1.0, 2.5), {1000.0})[0].second;
    ok = ok && exp_ratio > 2.0 && par_ratio >= 0.95 && par_ratio <= 1.05;
    m << "ratio Exp(1)@20 " << fmt(exp_ratio, 5) << ", Pareto(1,2)@100 " << fmt(par_ratio, 5)
      << ", Pareto(1,2.5)@1000 " << fmt(ref_ratio, 5);
    set(v, ok, m.str());
    return v;
}

Verdict check_determinism(bool identical, const std::string& detail) {
    Verdict v = make(12, "repeated pipeline runs are byte-identical");
    set(v, identical, identical ? "identical" : "outputs differ", detail);
    return v;
}

}  // namespace fluidnet
