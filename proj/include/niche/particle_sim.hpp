#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/kernels.hpp"
#include "niche/rng.hpp"

namespace niche {

/// Uniform Cartesian cells over an axis-aligned box (1D or 2D).
class HistogramGrid {
public:
    HistogramGrid() = default;
    HistogramGrid(Point lo, Point hi, std::array<int, 2> cells);

    /// Cells of width dx covering the bounding box of a bounded domain. The
    /// box extent must be a whole number of cells.
    static HistogramGrid over_domain(const Domain& domain, double dx);

    int dim() const { return lo_.dim(); }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }
    int cells(int axis) const { return cells_[axis]; }
    int cell_count() const;
    double width(int axis) const { return (hi_[axis] - lo_[axis]) / cells_[axis]; }
    double cell_volume() const;
    Point cell_center(int index) const;
    /// Index of the cell containing x (half-open cells), or -1 outside the box.
    int locate(const Point& x) const;

    /// Same cells up to a relative tolerance on the box corners.
    bool matches(const HistogramGrid& other, double tol = 1e-9) const;

private:
    Point lo_, hi_;
    std::array<int, 2> cells_{1, 1};
};

struct HistogramEstimate {
    HistogramGrid grid;
    std::vector<std::int64_t> counts;
    std::vector<double> density;  ///< counts / (N * cell volume)
    std::int64_t total = 0;
};

HistogramEstimate estimate_density(std::span<const Point> positions, const HistogramGrid& grid);

/// Initial law of the particles (and initial datum of the field solvers).
struct InitialCondition {
    enum class Kind { PointMass, Uniform, Function };
    Kind kind = Kind::PointMass;
    Point x0{0.5};
    /// Density for Kind::Function; sampled by rejection against `bound`.
    std::function<double(const Point&)> density;
    double bound = 0.0;

    static InitialCondition point_mass(Point x0);
    static InitialCondition uniform();
    static InitialCondition function(std::function<double(const Point&)> f, double bound);
};

struct EnsembleConfig {
    ProcessParams params{0.5, 0.5, 1e-3};
    Domain domain = Domain::interval(0.0, 1.0);
    std::int64_t particles = 1000;
    double final_time = 0.1;
    std::vector<double> snapshot_times;  ///< final_time is always included
    InitialCondition initial;
    HistogramGrid grid;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct EnsembleSnapshot {
    std::int64_t step = 0;
    double time = 0.0;
    HistogramEstimate histogram;
    Point mean;
    double variance = 0.0;  ///< sum over coordinates
};

/// Number of whole steps of length tau that fit in t (with a small relative
/// slack so that t = k tau computed in floating point maps to k).
std::int64_t steps_for_time(double t, double tau);

/// One step of the process: a jump with probability p, otherwise a walk step.
Point step_particle(const ProcessParams& params, const Domain& domain, const Point& x,
                    CounterRng& rng);

/// Draw the initial positions. Particle i uses stream (seed, i, 0).
std::vector<Point> initialize_positions(const Domain& domain, const InitialCondition& initial,
                                        std::int64_t count, std::uint64_t seed);

/// Advance every particle from step `first_step` to `last_step`; step k of
/// particle i uses stream (seed, i, k), so the result does not depend on
/// `workers`.
void advance_positions(std::vector<Point>& positions, const ProcessParams& params,
                       const Domain& domain, std::int64_t first_step, std::int64_t last_step,
                       std::uint64_t seed, int workers);

/// Simulate the ensemble and histogram it at each snapshot time (rounded down
/// to a multiple of tau).
std::vector<EnsembleSnapshot> run_ensemble(const EnsembleConfig& config);

}  // namespace niche
