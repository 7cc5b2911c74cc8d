#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fluidnet/distributions.hpp"
#include "fluidnet/dynamics.hpp"
#include "fluidnet/network.hpp"

namespace fluidnet {

/// Point on a simulated path. The majorant holds the coupled parallel-queue
/// contents (same jumps, node i draining at delta_i while busy).
struct PathState {
    double t = 0.0;
    std::array<double, 2> z{};
    std::array<double, 2> y{};
    double next_jump_time = 0.0;
    std::array<double, 2> majorant{};
};

/// One linear stretch of a path between regime changes.
struct PathPiece {
    double start = 0.0;
    double duration = 0.0;
    std::array<double, 2> z0{}, z1{};
    std::array<double, 2> regulator_rate{};
    std::array<double, 2> majorant0{}, majorant1{};
};

/// Moves `s` forward to `target` (<= s.next_jump_time) exactly, splitting the
/// interval at every zero-hitting time. `visit(const PathPiece&)` is called on
/// each linear piece. Coordinates hitting zero within 1e-12 time units of each
/// other are processed at one epoch.
template <class Visitor>
void advance_path(PathState& s, const DerivedQuantities& d, double target, bool majorant, Visitor&& visit);

/// Advance through the jump-free interval up to s.next_jump_time.
PathState advance_to_jump(PathState s, const DerivedQuantities& d);

/// Draws successive interarrival gaps of the arrival model.
class ArrivalClock {
public:
    explicit ArrivalClock(ArrivalModel model) : model_(std::move(model)) {}
    double next_gap(Rng& rng) const;

private:
    ArrivalModel model_;
};

/// Add the batch (j1, j2) to both the network and the majorant and schedule the next arrival.
PathState apply_jump(PathState s, std::array<double, 2> jump, double next_jump_time);

/// Two-sided 97.5% Student-t quantile.
double student_t_975(std::size_t dof);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    /// Student-t 95% halfwidth over the batch means.
    double halfwidth = 0.0;
    std::size_t batches = 0;
};

/// Raw integrals collected over one batch of the observation window.
struct BatchTotals {
    std::uint64_t seed = 0;
    int index = 0;
    double duration = 0.0;
    /// time with c.Z > x, laid out [direction][grid]
    std::vector<double> tail_time;
    std::array<double, 2> regulator{};
    double empty_time = 0.0;
    /// integral of 1(Z_{other} = 0) dY_i
    std::array<double, 2> palm_atom{};
    /// integral of 1(Z_{other} > x) dY_i
    std::array<std::vector<double>, 2> palm_tail;
    /// time with Z_i > x and Z_{other} = 0
    std::array<std::vector<double>, 2> boundary_joint;
    /// time integral of exp(<theta, Z>)
    std::vector<double> mgf;
    /// integral of exp(theta_{other} Z_{other}) dY_i
    std::array<std::vector<double>, 2> palm_mgf;
    /// time integral of 1(Z_i = 0) exp(theta_{other} Z_{other})
    std::array<std::vector<double>, 2> boundary_mgf;
    /// time with majorant_i > x
    std::array<std::vector<double>, 2> majorant_tail;

    void add(const BatchTotals& other);
};

/// Pathwise checks gathered at every event epoch.
struct InvariantReport {
    std::uint64_t epochs = 0;
    /// max over epochs and coordinates of |Z - Z(0) - X - R Y|
    double max_reflection_residual = 0.0;
    /// integral of 1(Z_i > 0) dY_i
    double complementarity_mass = 0.0;
    double min_content = 0.0;
    std::uint64_t dominance_violations = 0;
    /// max over epochs of Z_i - majorant_i
    double max_dominance_gap = -std::numeric_limits<double>::infinity();

    void merge(const InvariantReport& other);
};

struct SimulationOptions {
    double horizon = 1e6;
    /// Defaults to 5% of the horizon.
    std::optional<double> warmup;
    std::vector<double> grid;
    std::vector<Direction> directions{Direction(1.0, 0.0)};
    std::vector<std::array<double, 2>> thetas;
    int batches = 20;
    bool track_majorant = false;

    double warmup_time() const { return warmup.value_or(0.05 * horizon); }
};

/// Accumulated time-average estimates over one or more seeds.
class PathStats {
public:
    PathStats() = default;
    PathStats(std::vector<double> grid, std::vector<Direction> directions,
              std::vector<std::array<double, 2>> thetas, bool poisson, bool majorant,
              std::vector<BatchTotals> batches, InvariantReport invariants);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Direction>& directions() const { return directions_; }
    const std::vector<std::array<double, 2>>& thetas() const { return thetas_; }
    bool poisson() const { return poisson_; }
    bool majorant_tracked() const { return majorant_; }
    const std::vector<BatchTotals>& batches() const { return batches_; }
    const BatchTotals& totals() const { return total_; }
    const InvariantReport& invariants() const { return invariants_; }
    double observed_time() const { return total_.duration; }
    std::vector<std::uint64_t> seeds() const;

    /// Pooled value f(totals) with batch-means error from f(batch_b).
    template <class F>
    Estimate estimate(F&& f) const;

    Estimate tail(std::size_t direction, std::size_t k) const;
    Estimate regulator_rate(int node) const;
    Estimate empty_fraction() const;
    Estimate palm_atom_rate(int node) const;
    Estimate palm_tail(int node, std::size_t k) const;
    Estimate boundary_joint(int node, std::size_t k) const;
    Estimate mgf(std::size_t theta) const;
    Estimate palm_mgf(int node, std::size_t theta) const;
    Estimate boundary_mgf(int node, std::size_t theta) const;
    Estimate majorant_tail(int node, std::size_t k) const;

    std::optional<std::size_t> direction_index(Direction c) const;
    std::optional<std::size_t> theta_index(std::array<double, 2> theta) const;

    /// Pooling of seeds; associative and commutative (batches are kept sorted
    /// by seed and index before any summation).
    friend PathStats merge(const PathStats& a, const PathStats& b);

private:
    void rebuild_total();

    std::vector<double> grid_;
    std::vector<Direction> directions_;
    std::vector<std::array<double, 2>> thetas_;
    bool poisson_ = true;
    bool majorant_ = false;
    std::vector<BatchTotals> batches_;
    BatchTotals total_;
    InvariantReport invariants_;
};

/// Long-run simulation from Z = (0,0), discarding [0, warmup].
PathStats run(const NetworkParams& p, const SimulationOptions& opt, std::uint64_t seed);

struct MajorantResult {
    PathStats stats;
    bool pathwise_dominance = false;
};

/// Simulation with the coupled parallel-queue majorant. Requires strong stability.
MajorantResult run_majorant(const NetworkParams& p, SimulationOptions opt, std::uint64_t seed);

/// One path per seed on a bounded worker pool, returned in seed order.
std::vector<PathStats> run_seeds(const NetworkParams& p, const SimulationOptions& opt,
                                 const std::vector<std::uint64_t>& seeds, int workers = 1);

/// Independent replications over seeds (bounded worker pool), merged.
PathStats run_replications(const NetworkParams& p, const SimulationOptions& opt,
                           const std::vector<std::uint64_t>& seeds, int workers = 1);

/// |kappa(theta) phi(theta) - (theta1 - p12 theta2) phi1(theta2) - (theta2 - p21 theta1) phi2(theta1)|
/// with its batch-means standard error. theta must be one of the recorded thetas.
Estimate balance_residual(const PathStats& stats, const DerivedQuantities& d, const JumpModel& jumps,
                          std::array<double, 2> theta);

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

// --- template definitions -------------------------------------------------

template <class Visitor>
void advance_path(PathState& s, const DerivedQuantities& d, double target, bool majorant, Visitor&& visit) {
    constexpr double kSimultaneous = 1e-12;
    while (s.t < target) {
        const FlowRates rates = drift(d, s.z);
        double step = target - s.t;
        std::array<double, 2> hit{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        std::array<double, 2> mhit = hit;
        for (int i = 0; i < 2; ++i) {
            if (s.z[i] > 0.0 && rates.content[i] < 0.0) hit[i] = s.z[i] / -rates.content[i];
            if (majorant && s.majorant[i] > 0.0) mhit[i] = s.majorant[i] / d.drain[i];
            step = std::min({step, hit[i], mhit[i]});
        }
        // Interior pieces use the analytic step as their duration so that a
        // coordinate clamped to zero moved by exactly rate * dt; only the final
        // piece takes its length from the (rounded) clock difference.
        const bool last = !(s.t + step < target);
        const double end = last ? target : s.t + step;
        const double dt = last ? target - s.t : step;

        PathPiece piece;
        piece.start = s.t;
        piece.duration = dt;
        piece.z0 = s.z;
        piece.regulator_rate = rates.regulator;
        piece.majorant0 = s.majorant;
        for (int i = 0; i < 2; ++i) {
            if (hit[i] <= dt + kSimultaneous) s.z[i] = 0.0;
            else s.z[i] = std::max(0.0, s.z[i] + rates.content[i] * dt);
            s.y[i] += rates.regulator[i] * dt;
            if (majorant) {
                if (mhit[i] <= dt + kSimultaneous) s.majorant[i] = 0.0;
                else if (s.majorant[i] > 0.0) s.majorant[i] = std::max(0.0, s.majorant[i] - d.drain[i] * dt);
            }
        }
        piece.z1 = s.z;
        piece.majorant1 = s.majorant;
        s.t = end;
        if (dt > 0.0) visit(piece);
    }
}

template <class F>
Estimate PathStats::estimate(F&& f) const {
    Estimate e;
    e.value = f(total_);
    e.batches = batches_.size();
    if (batches_.size() < 2) return e;
    double mean = 0.0;
    std::vector<double> values;
    values.reserve(batches_.size());
    for (const auto& b : batches_) {
        values.push_back(f(b));
        mean += values.back();
    }
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double n = static_cast<double>(values.size());
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
    e.halfwidth = student_t_975(values.size() - 1) * e.std_error;
    return e;
}

}  // namespace fluidnet
