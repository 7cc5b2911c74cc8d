#include "fluidnet/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

namespace fluidnet {

double student_t_975(std::size_t dof) {
    if (dof == 0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(boost::math::students_t_distribution<double>(static_cast<double>(dof)), 0.975);
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log grid needs 0 < lo < hi and >= 2 points");
    std::vector<double> g(points);
    const double ratio = std::log(hi / lo);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(points - 1));
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (!(lo >= 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("linear grid needs 0 <= lo < hi and >= 2 points");
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
}

PathState advance_to_jump(PathState s, const DerivedQuantities& d) {
    if (!(s.t < s.next_jump_time)) throw std::invalid_argument("advance_to_jump: clock is not before the next jump");
    advance_path(s, d, s.next_jump_time, false, [](const PathPiece&) {});
    return s;
}

double ArrivalClock::next_gap(Rng& rng) const {
    if (const auto* p = std::get_if<PoissonArrivals>(&model_)) return -std::log(rng.uniform()) / p->rate;
    return std::get<RenewalArrivals>(model_).interarrival.sample(rng);
}

PathState apply_jump(PathState s, std::array<double, 2> jump, double next_jump_time) {
    if (jump[0] < 0.0 || jump[1] < 0.0) throw std::invalid_argument("jumps must be nonnegative");
    for (int i = 0; i < 2; ++i) {
        s.z[i] += jump[i];
        s.majorant[i] += jump[i];
    }
    s.next_jump_time = next_jump_time;
    return s;
}

// --- batch bookkeeping ---------------------------------------------------------

void BatchTotals::add(const BatchTotals& o) {
    const auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
        if (a.empty()) a.assign(b.size(), 0.0);
        for (std::size_t k = 0; k < b.size(); ++k) a[k] += b[k];
    };
    duration += o.duration;
    acc(tail_time, o.tail_time);
    empty_time += o.empty_time;
    acc(mgf, o.mgf);
    for (int i = 0; i < 2; ++i) {
        regulator[i] += o.regulator[i];
        palm_atom[i] += o.palm_atom[i];
        acc(palm_tail[i], o.palm_tail[i]);
        acc(boundary_joint[i], o.boundary_joint[i]);
        acc(palm_mgf[i], o.palm_mgf[i]);
        acc(boundary_mgf[i], o.boundary_mgf[i]);
        acc(majorant_tail[i], o.majorant_tail[i]);
    }
}

void InvariantReport::merge(const InvariantReport& o) {
    epochs += o.epochs;
    max_reflection_residual = std::max(max_reflection_residual, o.max_reflection_residual);
    complementarity_mass = std::max(complementarity_mass, o.complementarity_mass);
    min_content = std::min(min_content, o.min_content);
    dominance_violations += o.dominance_violations;
    max_dominance_gap = std::max(max_dominance_gap, o.max_dominance_gap);
}

namespace {

// Weighted time above each grid level for a quantity moving linearly from v0
// to v1. Full-weight contributions are kept as suffix markers and resolved once.
class GridIntegrator {
public:
    explicit GridIntegrator(const std::vector<double>* grid)
        : grid_(grid), marker_(grid->size() + 1, 0.0), partial_(grid->size(), 0.0) {}

    void add(double v0, double v1, double weight) {
        const double lo = std::min(v0, v1);
        const double hi = std::max(v0, v1);
        const auto& g = *grid_;
        auto k = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), lo) - g.begin());
        marker_[k] += weight;
        for (; k < g.size() && g[k] < hi; ++k) partial_[k] += weight * (hi - g[k]) / (hi - lo);
    }

    std::vector<double> finish() const {
        std::vector<double> out(partial_);
        double suffix = 0.0;
        for (std::size_t k = out.size(); k-- > 0;) {
            suffix += marker_[k + 1];
            out[k] += suffix;
        }
        return out;
    }

private:
    const std::vector<double>* grid_;
    std::vector<double> marker_;
    std::vector<double> partial_;
};

// Average of exp(a + b s) over s in [0, 1], evaluated without overflow.
double mean_exp(double a, double b) {
    if (b == 0.0) return std::exp(a);
    if (b > 0.0) return std::exp(a + b) * -std::expm1(-b) / b;
    return std::exp(a) * std::expm1(b) / b;
}

class BatchRecorder {
public:
    BatchRecorder(const SimulationOptions& opt, std::uint64_t seed, int index)
        : opt_(&opt) {
        totals_.seed = seed;
        totals_.index = index;
        for (std::size_t k = 0; k < opt.directions.size(); ++k) tails_.emplace_back(&opt.grid);
        for (int i = 0; i < 2; ++i) {
            palm_.emplace_back(&opt.grid);
            joint_.emplace_back(&opt.grid);
            major_.emplace_back(&opt.grid);
            totals_.palm_mgf[i].assign(opt.thetas.size(), 0.0);
            totals_.boundary_mgf[i].assign(opt.thetas.size(), 0.0);
        }
        totals_.mgf.assign(opt.thetas.size(), 0.0);
    }

    void record(const PathPiece& p) {
        const double dt = p.duration;
        totals_.duration += dt;
        for (std::size_t k = 0; k < opt_->directions.size(); ++k) {
            const Direction& c = opt_->directions[k];
            tails_[k].add(c.c1 * p.z0[0] + c.c2 * p.z0[1], c.c1 * p.z1[0] + c.c2 * p.z1[1], dt);
        }
        const bool empty = p.z0[0] == 0.0 && p.z0[1] == 0.0 && p.z1[0] == 0.0 && p.z1[1] == 0.0;
        if (empty) totals_.empty_time += dt;
        for (int i = 0; i < 2; ++i) {
            const int o = 1 - i;
            const double dy = p.regulator_rate[i] * dt;
            const bool other_empty = p.z0[o] == 0.0 && p.z1[o] == 0.0;
            const bool self_empty = p.z0[i] == 0.0 && p.z1[i] == 0.0;
            totals_.regulator[i] += dy;
            if (other_empty) joint_[i].add(p.z0[i], p.z1[i], dt);
            if (dy > 0.0) {
                palm_[i].add(p.z0[o], p.z1[o], dy);
                if (other_empty) totals_.palm_atom[i] += dy;
            }
            if (opt_->track_majorant) major_[i].add(p.majorant0[i], p.majorant1[i], dt);
            for (std::size_t j = 0; j < opt_->thetas.size(); ++j) {
                const double th = opt_->thetas[j][o];
                const double f = mean_exp(th * p.z0[o], th * (p.z1[o] - p.z0[o]));
                if (dy > 0.0) totals_.palm_mgf[i][j] += dy * f;
                if (self_empty) totals_.boundary_mgf[i][j] += dt * f;
            }
        }
        for (std::size_t j = 0; j < opt_->thetas.size(); ++j) {
            const auto& th = opt_->thetas[j];
            const double a = th[0] * p.z0[0] + th[1] * p.z0[1];
            const double b = th[0] * (p.z1[0] - p.z0[0]) + th[1] * (p.z1[1] - p.z0[1]);
            totals_.mgf[j] += dt * mean_exp(a, b);
        }
    }

    BatchTotals finish() {
        const std::size_t n = opt_->grid.size();
        totals_.tail_time.assign(n * tails_.size(), 0.0);
        for (std::size_t k = 0; k < tails_.size(); ++k) {
            const auto v = tails_[k].finish();
            std::copy(v.begin(), v.end(), totals_.tail_time.begin() + static_cast<std::ptrdiff_t>(k * n));
        }
        for (int i = 0; i < 2; ++i) {
            totals_.palm_tail[i] = palm_[i].finish();
            totals_.boundary_joint[i] = joint_[i].finish();
            totals_.majorant_tail[i] = opt_->track_majorant ? major_[i].finish() : std::vector<double>(n, 0.0);
        }
        return totals_;
    }

private:
    const SimulationOptions* opt_;
    BatchTotals totals_;
    std::vector<GridIntegrator> tails_;
    std::vector<GridIntegrator> palm_;
    std::vector<GridIntegrator> joint_;
    std::vector<GridIntegrator> major_;
};

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(long double v) {
        const long double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

void validate_options(const SimulationOptions& opt) {
    const double warm = opt.warmup_time();
    if (!(opt.horizon > warm) || !(warm > 0.0)) throw std::invalid_argument("simulation needs horizon > warmup > 0");
    if (opt.batches < 2) throw std::invalid_argument("at least two batches are required");
    if (opt.grid.empty()) throw std::invalid_argument("simulation grid is empty");
    if (!std::is_sorted(opt.grid.begin(), opt.grid.end()) ||
        std::adjacent_find(opt.grid.begin(), opt.grid.end()) != opt.grid.end() || opt.grid.front() < 0.0)
        throw std::invalid_argument("simulation grid must be strictly increasing and nonnegative");
    for (const auto& th : opt.thetas)
        if (th[0] > 0.0 || th[1] > 0.0) throw std::invalid_argument("MGF arguments must be nonpositive");
}

PathStats simulate_path(const NetworkParams& p, const SimulationOptions& opt, std::uint64_t seed) {
    validate_options(opt);
    const DerivedQuantities d = derive(p);
    const Stability stab = check_stability(d);
    if (stab == Stability::Unstable) throw std::invalid_argument("parameters are unstable: no stationary law to estimate");
    if (opt.track_majorant && stab != Stability::StronglyStable)
        throw std::invalid_argument("the parallel-queue majorant requires strong stability");

    Rng rng(seed);
    const ArrivalClock clock(p.arrival());
    const double warm = opt.warmup_time();
    const double batch_len = (opt.horizon - warm) / opt.batches;
    std::vector<double> cuts;
    for (int b = 0; b < opt.batches; ++b) cuts.push_back(warm + batch_len * b);
    cuts.push_back(opt.horizon);

    PathState s;
    s.next_jump_time = clock.next_gap(rng);
    std::array<CompensatedSum, 2> input;
    std::array<CompensatedSum, 2> regulator;
    CompensatedSum elapsed;
    InvariantReport inv;
    std::vector<BatchTotals> done;
    std::optional<BatchRecorder> recorder;
    std::size_t cut = 0;

    const auto visit = [&](const PathPiece& piece) {
        elapsed.add(piece.duration);
        for (int i = 0; i < 2; ++i) {
            const double dy = piece.regulator_rate[i] * piece.duration;
            regulator[i].add(dy);
            if (dy > 0.0 && piece.z0[i] > 0.0) inv.complementarity_mass += dy;
            inv.min_content = std::min({inv.min_content, piece.z1[i]});
        }
        if (recorder) recorder->record(piece);
    };

    const auto check_epoch = [&]() {
        ++inv.epochs;
        const long double t = elapsed.value();
        const std::array<long double, 2> y{regulator[0].value(), regulator[1].value()};
        for (int i = 0; i < 2; ++i) {
            const int o = 1 - i;
            const long double x = input[i].value() - static_cast<long double>(d.drain[i]) * t;
            const long double ry = y[i] - static_cast<long double>(d.routing(o)) * y[o];
            const long double res = static_cast<long double>(s.z[i]) - x - ry;
            inv.max_reflection_residual = std::max(inv.max_reflection_residual, static_cast<double>(std::fabs(res)));
            if (opt.track_majorant) {
                const double gap = s.z[i] - s.majorant[i];
                inv.max_dominance_gap = std::max(inv.max_dominance_gap, gap);
                if (gap > 0.0) ++inv.dominance_violations;
            }
        }
    };

    while (true) {
        const double target = std::min(s.next_jump_time, cuts[cut]);
        advance_path(s, d, target, opt.track_majorant, visit);
        if (s.t == cuts[cut]) {
            if (recorder) done.push_back(recorder->finish());
            recorder.reset();
            if (cut + 1 == cuts.size()) break;
            recorder.emplace(opt, seed, static_cast<int>(cut));
            ++cut;
        }
        if (s.t == s.next_jump_time) {
            check_epoch();
            const auto jump = p.jumps().sample(rng);
            for (int i = 0; i < 2; ++i) input[i].add(jump[i]);
            s = apply_jump(s, jump, s.t + clock.next_gap(rng));
        }
    }
    check_epoch();
    return PathStats(opt.grid, opt.directions, opt.thetas, p.poisson(), opt.track_majorant, std::move(done), inv);
}

}  // namespace

// --- PathStats ---------------------------------------------------------------

PathStats::PathStats(std::vector<double> grid, std::vector<Direction> directions,
                     std::vector<std::array<double, 2>> thetas, bool poisson, bool majorant,
                     std::vector<BatchTotals> batches, InvariantReport invariants)
    : grid_(std::move(grid)), directions_(std::move(directions)), thetas_(std::move(thetas)),
      poisson_(poisson), majorant_(majorant), batches_(std::move(batches)), invariants_(invariants) {
    rebuild_total();
}

void PathStats::rebuild_total() {
    std::sort(batches_.begin(), batches_.end(), [](const BatchTotals& a, const BatchTotals& b) {
        return std::tie(a.seed, a.index) < std::tie(b.seed, b.index);
    });
    total_ = BatchTotals{};
    for (const auto& b : batches_) total_.add(b);
}

std::vector<std::uint64_t> PathStats::seeds() const {
    std::vector<std::uint64_t> out;
    for (const auto& b : batches_)
        if (out.empty() || out.back() != b.seed) out.push_back(b.seed);
    return out;
}

PathStats merge(const PathStats& a, const PathStats& b) {
    if (a.grid_ != b.grid_ || a.directions_ != b.directions_ || a.thetas_ != b.thetas_ ||
        a.poisson_ != b.poisson_ || a.majorant_ != b.majorant_)
        throw std::invalid_argument("cannot merge statistics with different layouts");
    for (auto sa : a.seeds())
        for (auto sb : b.seeds())
            if (sa == sb) throw std::invalid_argument("cannot merge statistics sharing a seed");
    PathStats out = a;
    out.batches_.insert(out.batches_.end(), b.batches_.begin(), b.batches_.end());
    out.invariants_.merge(b.invariants_);
    out.rebuild_total();
    return out;
}

std::optional<std::size_t> PathStats::direction_index(Direction c) const {
    for (std::size_t k = 0; k < directions_.size(); ++k)
        if (directions_[k] == c) return k;
    return std::nullopt;
}

std::optional<std::size_t> PathStats::theta_index(std::array<double, 2> theta) const {
    for (std::size_t k = 0; k < thetas_.size(); ++k)
        if (thetas_[k] == theta) return k;
    return std::nullopt;
}

Estimate PathStats::tail(std::size_t dir, std::size_t k) const {
    const std::size_t n = grid_.size();
    return estimate([=](const BatchTotals& b) { return b.tail_time[dir * n + k] / b.duration; });
}

Estimate PathStats::regulator_rate(int i) const {
    return estimate([=](const BatchTotals& b) { return b.regulator[i] / b.duration; });
}

Estimate PathStats::empty_fraction() const {
    return estimate([](const BatchTotals& b) { return b.empty_time / b.duration; });
}

Estimate PathStats::palm_atom_rate(int i) const {
    return estimate([=](const BatchTotals& b) { return b.palm_atom[i] / b.duration; });
}

Estimate PathStats::palm_tail(int i, std::size_t k) const {
    return estimate([=](const BatchTotals& b) { return b.palm_tail[i][k] / b.duration; });
}

Estimate PathStats::boundary_joint(int i, std::size_t k) const {
    return estimate([=](const BatchTotals& b) { return b.boundary_joint[i][k] / b.duration; });
}

Estimate PathStats::mgf(std::size_t j) const {
    return estimate([=](const BatchTotals& b) { return b.mgf[j] / b.duration; });
}

Estimate PathStats::palm_mgf(int i, std::size_t j) const {
    return estimate([=](const BatchTotals& b) { return b.palm_mgf[i][j] / b.duration; });
}

Estimate PathStats::boundary_mgf(int i, std::size_t j) const {
    return estimate([=](const BatchTotals& b) { return b.boundary_mgf[i][j] / b.duration; });
}

Estimate PathStats::majorant_tail(int i, std::size_t k) const {
    if (!majorant_) throw std::logic_error("majorant was not tracked in this run");
    return estimate([=](const BatchTotals& b) { return b.majorant_tail[i][k] / b.duration; });
}

// --- entry points ----------------------------------------------------------------

PathStats run(const NetworkParams& p, const SimulationOptions& opt, std::uint64_t seed) {
    return simulate_path(p, opt, seed);
}

MajorantResult run_majorant(const NetworkParams& p, SimulationOptions opt, std::uint64_t seed) {
    opt.track_majorant = true;
    MajorantResult r;
    r.stats = simulate_path(p, opt, seed);
    r.pathwise_dominance = r.stats.invariants().dominance_violations == 0;
    return r;
}

std::vector<PathStats> run_seeds(const NetworkParams& p, const SimulationOptions& opt,
                                 const std::vector<std::uint64_t>& seeds, int workers) {
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    std::vector<std::optional<PathStats>> results(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t k = next++; k < seeds.size(); k = next++) {
            try {
                results[k] = simulate_path(p, opt, seeds[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(workers, 1, static_cast<int>(seeds.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<PathStats> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

PathStats run_replications(const NetworkParams& p, const SimulationOptions& opt,
                           const std::vector<std::uint64_t>& seeds, int workers) {
    const std::vector<PathStats> results = run_seeds(p, opt, seeds, workers);
    PathStats merged = results[0];
    for (std::size_t k = 1; k < results.size(); ++k) merged = merge(merged, results[k]);
    return merged;
}

Estimate balance_residual(const PathStats& stats, const DerivedQuantities& d, const JumpModel& jumps,
                          std::array<double, 2> theta) {
    if (theta[0] > 0.0 || theta[1] > 0.0) throw std::invalid_argument("balance residual needs theta <= 0");
    if (!stats.poisson()) throw std::invalid_argument("the balance equation requires Poisson arrivals");
    const auto j = stats.theta_index(theta);
    if (!j) throw std::invalid_argument("theta was not recorded during simulation");
    const double kappa =
        d.drain[0] * theta[0] + d.drain[1] * theta[1] - d.lambda * (jumps.laplace(theta[0], theta[1]) - 1.0);
    const double w1 = theta[0] - d.p12 * theta[1];
    const double w2 = theta[1] - d.p21 * theta[0];
    const std::size_t k = *j;
    Estimate e = stats.estimate([&](const BatchTotals& b) {
        return (kappa * b.mgf[k] - w1 * b.palm_mgf[0][k] - w2 * b.palm_mgf[1][k]) / b.duration;
    });
    e.value = std::fabs(e.value);
    return e;
}

}  // namespace fluidnet
