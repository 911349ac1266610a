#include "niche/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "niche/error.hpp"

namespace niche {

HistogramGrid::HistogramGrid(Point lo, Point hi, std::array<int, 2> cells)
    : lo_(lo), hi_(hi), cells_(cells) {
    if (lo.dim() != hi.dim() || lo.dim() < 1 || lo.dim() > 2)
        throw PreconditionError("HistogramGrid: only 1D and 2D boxes are supported");
    if (lo.dim() == 1) cells_[1] = 1;
    for (int k = 0; k < lo.dim(); ++k) {
        if (!(hi[k] > lo[k])) throw PreconditionError("HistogramGrid: empty box");
        if (cells_[k] < 1) throw PreconditionError("HistogramGrid: need at least one cell per axis");
    }
}

HistogramGrid HistogramGrid::over_domain(const Domain& domain, double dx) {
    if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
    Point lo, hi;
    domain.bounding_box(lo, hi);
    std::array<int, 2> cells{1, 1};
    for (int k = 0; k < lo.dim(); ++k) {
        const double n = (hi[k] - lo[k]) / dx;
        const double rounded = std::round(n);
        if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
            throw ConfigError("grid spacing must divide the domain extent into whole cells");
        cells[k] = static_cast<int>(rounded);
    }
    return HistogramGrid(lo, hi, cells);
}

int HistogramGrid::cell_count() const { return dim() == 1 ? cells_[0] : cells_[0] * cells_[1]; }

double HistogramGrid::cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= width(k);
    return v;
}

Point HistogramGrid::cell_center(int index) const {
    if (dim() == 1) return Point{lo_[0] + (index + 0.5) * width(0)};
    const int i = index % cells_[0], j = index / cells_[0];
    return Point{lo_[0] + (i + 0.5) * width(0), lo_[1] + (j + 0.5) * width(1)};
}

int HistogramGrid::locate(const Point& x) const {
    if (x.dim() != dim()) throw PreconditionError("HistogramGrid::locate: dimension mismatch");
    int idx[2] = {0, 0};
    for (int k = 0; k < dim(); ++k) {
        if (!(x[k] >= lo_[k] && x[k] <= hi_[k])) return -1;
        idx[k] = std::min(cells_[k] - 1, static_cast<int>((x[k] - lo_[k]) / width(k)));
    }
    return idx[0] + cells_[0] * idx[1];
}

bool HistogramGrid::matches(const HistogramGrid& other, double tol) const {
    if (dim() != other.dim()) return false;
    for (int k = 0; k < dim(); ++k) {
        if (cells_[k] != other.cells_[k]) return false;
        const double scale = std::max(1.0, hi_[k] - lo_[k]);
        if (std::abs(lo_[k] - other.lo_[k]) > tol * scale) return false;
        if (std::abs(hi_[k] - other.hi_[k]) > tol * scale) return false;
    }
    return true;
}

HistogramEstimate estimate_density(std::span<const Point> positions, const HistogramGrid& grid) {
    if (positions.empty()) throw PreconditionError("estimate_density: empty ensemble");
    HistogramEstimate est;
    est.grid = grid;
    est.counts.assign(grid.cell_count(), 0);
    for (const Point& x : positions) {
        const int c = grid.locate(x);
        if (c < 0) throw PreconditionError("estimate_density: particle outside the histogram box");
        ++est.counts[c];
    }
    est.total = static_cast<std::int64_t>(positions.size());
    const double norm = 1.0 / (static_cast<double>(est.total) * grid.cell_volume());
    est.density.resize(est.counts.size());
    for (std::size_t i = 0; i < est.counts.size(); ++i)
        est.density[i] = static_cast<double>(est.counts[i]) * norm;
    return est;
}

InitialCondition InitialCondition::point_mass(Point x0) {
    InitialCondition ic;
    ic.kind = Kind::PointMass;
    ic.x0 = x0;
    return ic;
}

InitialCondition InitialCondition::uniform() {
    InitialCondition ic;
    ic.kind = Kind::Uniform;
    return ic;
}

InitialCondition InitialCondition::function(std::function<double(const Point&)> f, double bound) {
    InitialCondition ic;
    ic.kind = Kind::Function;
    ic.density = std::move(f);
    ic.bound = bound;
    return ic;
}

std::int64_t steps_for_time(double t, double tau) {
    if (t < 0.0) throw ConfigError("times must be non-negative");
    return static_cast<std::int64_t>(std::floor(t / tau * (1.0 + 1e-12)));
}

Point step_particle(const ProcessParams& params, const Domain& domain, const Point& x,
                    CounterRng& rng) {
    if (rng.bernoulli(params.p())) return sample_jump_step(params, domain, x, rng);
    return sample_walk_step(params, domain, x, rng);
}

namespace {

Point sample_initial(const Domain& domain, const InitialCondition& initial, CounterRng& rng) {
    switch (initial.kind) {
        case InitialCondition::Kind::PointMass:
            return initial.x0;
        case InitialCondition::Kind::Uniform:
        case InitialCondition::Kind::Function: {
            Point lo, hi;
            domain.bounding_box(lo, hi);
            Point y(domain.dim());
            for (int attempt = 0; attempt < 1000000; ++attempt) {
                for (int k = 0; k < y.dim(); ++k) y[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
                if (!domain.contains(y)) continue;
                if (initial.kind == InitialCondition::Kind::Uniform) return y;
                if (rng.uniform() * initial.bound < initial.density(y)) return y;
            }
            throw NumericalError("initial condition: rejection sampling failed");
        }
    }
    throw PreconditionError("unknown initial condition");
}

template <class Body>
void parallel_for(std::int64_t count, int workers, Body body) {
    workers = std::max(1, workers);
    if (workers == 1 || count < 2 * workers) {
        body(0, count);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::int64_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<Point> initialize_positions(const Domain& domain, const InitialCondition& initial,
                                        std::int64_t count, std::uint64_t seed) {
    if (count <= 0) throw ConfigError("particle count must be positive");
    if (initial.kind == InitialCondition::Kind::PointMass) {
        if (initial.x0.dim() != domain.dim()) throw ConfigError("initial point has the wrong dimension");
        if (!domain.contains(initial.x0)) throw ConfigError("initial point lies outside the domain");
    }
    if (initial.kind == InitialCondition::Kind::Function && (!initial.density || !(initial.bound > 0.0)))
        throw ConfigError("function initial condition needs a density and a positive bound");
    std::vector<Point> positions(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i), 0);
        positions[i] = sample_initial(domain, initial, rng);
    }
    return positions;
}

void advance_positions(std::vector<Point>& positions, const ProcessParams& params,
                       const Domain& domain, std::int64_t first_step, std::int64_t last_step,
                       std::uint64_t seed, int workers) {
    const auto count = static_cast<std::int64_t>(positions.size());
    parallel_for(count, workers, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            Point x = positions[i];
            for (std::int64_t k = first_step + 1; k <= last_step; ++k) {
                CounterRng rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
                x = step_particle(params, domain, x, rng);
            }
            positions[i] = x;
        }
    });
}

std::vector<EnsembleSnapshot> run_ensemble(const EnsembleConfig& config) {
    if (config.particles <= 0) throw ConfigError("particle count must be positive");
    if (!(config.final_time >= 0.0)) throw ConfigError("final time must be non-negative");
    if (config.grid.dim() != config.domain.dim())
        throw ConfigError("histogram grid dimension does not match the domain");
    const double tau = config.params.tau();

    std::vector<std::int64_t> steps;
    for (double t : config.snapshot_times) {
        if (t < 0.0 || t > config.final_time * (1.0 + 1e-12))
            throw ConfigError("snapshot times must lie in [0, T]");
        steps.push_back(steps_for_time(t, tau));
    }
    steps.push_back(steps_for_time(config.final_time, tau));
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    std::vector<Point> positions =
        initialize_positions(config.domain, config.initial, config.particles, config.seed);
    std::vector<EnsembleSnapshot> out;
    std::int64_t current = 0;
    for (std::int64_t k : steps) {
        advance_positions(positions, config.params, config.domain, current, k, config.seed,
                          config.workers);
        current = k;
        EnsembleSnapshot snap;
        snap.step = k;
        snap.time = static_cast<double>(k) * tau;
        snap.histogram = estimate_density(positions, config.grid);
        const int n = config.domain.dim();
        snap.mean = Point(n);
        for (const Point& x : positions) snap.mean += x;
        snap.mean *= 1.0 / static_cast<double>(positions.size());
        double var = 0.0;
        for (const Point& x : positions) var += (x - snap.mean).norm2();
        snap.variance = var / static_cast<double>(positions.size());
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace niche
