#include "niche/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "niche/error.hpp"

namespace niche {

namespace {

// In-place LU factorization with partial pivoting of an m x m row-major matrix.
void lu_factor(std::vector<double>& a, std::vector<int>& piv, int m) {
    piv.resize(m);
    for (int k = 0; k < m; ++k) {
        int best = k;
        for (int i = k + 1; i < m; ++i)
            if (std::abs(a[i * m + k]) > std::abs(a[best * m + k])) best = i;
        piv[k] = best;
        if (best != k)
            for (int j = 0; j < m; ++j) std::swap(a[k * m + j], a[best * m + j]);
        const double d = a[k * m + k];
        if (d == 0.0) throw NumericalError("collar system is singular");
        for (int i = k + 1; i < m; ++i) {
            const double f = a[i * m + k] /= d;
            if (f == 0.0) continue;
            for (int j = k + 1; j < m; ++j) a[i * m + j] -= f * a[k * m + j];
        }
    }
}

void lu_solve(const std::vector<double>& a, const std::vector<int>& piv, std::vector<double>& b) {
    const int m = static_cast<int>(piv.size());
    for (int k = 0; k < m; ++k) {
        std::swap(b[k], b[piv[k]]);
        for (int i = k + 1; i < m; ++i) b[i] -= a[i * m + k] * b[k];
    }
    for (int k = m - 1; k >= 0; --k) {
        for (int j = k + 1; j < m; ++j) b[k] -= a[k * m + j] * b[j];
        b[k] /= a[k * m + k];
    }
}

}  // namespace

PhantomProcess::PhantomProcess(const PhantomConfig& config)
    : config_(config),
      lattice_(std::make_shared<Lattice>(config.domain, config.grid.dx, config.grid.band_width)) {
    const Lattice& L = *lattice_;
    const ProcessParams& P = config.params;
    const double dx = L.dx(), r = P.walk_radius(), h = P.h(), s = P.s();
    const int n = L.dim();
    if (r < 2.0 * dx) throw PreconditionError("phantom process: grid does not resolve the walk radius");
    if (L.band() * dx < std::max(r, h))
        throw PreconditionError("phantom process: exterior band is narrower than the step length");

    extension_ = std::make_shared<NonlocalOperator>(lattice_, s);
    jump_ = std::make_shared<CellKernelTable>(n, L.extent(0) - 1, L.extent(1) - 1, dx, s, h);
    jump_scale_ = 2.0 * s * std::pow(h, 2.0 * s) / unit_sphere_area(n);

    // Walk weights: |cell ∩ B_r| / |B_r| for offsets within reach.
    walk_reach_ = static_cast<int>(std::ceil(r / dx + 0.5));
    const int width = 2 * walk_reach_ + 1;
    walk_.assign(n == 1 ? width : width * width, 0.0);
    const double ball = unit_ball_volume(n) * std::pow(r, n);
    for (int dj = (n == 1 ? 0 : -walk_reach_); dj <= (n == 1 ? 0 : walk_reach_); ++dj)
        for (int di = -walk_reach_; di <= walk_reach_; ++di) {
            double overlap;
            if (n == 1) {
                overlap = std::max(0.0, std::min((di + 0.5) * dx, r) - std::max((di - 0.5) * dx, -r));
            } else {
                const Domain cell = Domain::rectangle({(di - 0.5) * dx, (dj - 0.5) * dx},
                                                      {(di + 0.5) * dx, (dj + 0.5) * dx});
                overlap = ball_intersection_volume(cell, Point{0.0, 0.0}, r);
            }
            walk_[(di + walk_reach_) + width * (dj + (n == 1 ? 0 : walk_reach_))] = overlap / ball;
        }

    const auto& interior = L.interior_nodes();
    far_jump_.resize(interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k)
        far_jump_[k] = jump_scale_ * far_field_weight(L.box_lo(), L.box_hi(), L.position(interior[k]), s);

    collar_slot_.assign(L.size(), -1);
    for (int node : interior) {
        if (L.domain().distance_to_boundary(L.position(node)) > r) {
            core_.push_back(node);
        } else {
            collar_slot_[node] = static_cast<int>(collar_.size());
            collar_.push_back(node);
        }
    }
    if (core_.empty()) throw PreconditionError("phantom process: the domain has no points farther than the walk radius from its boundary");

    // Collar rows: ball averages over Ω ∩ B_r(x_c), split into collar and core parts.
    const int m = static_cast<int>(collar_.size());
    lu_.assign(static_cast<std::size_t>(m) * m, 0.0);
    collar_to_core_.assign(m, {});
    for (int c = 0; c < m; ++c) {
        const auto cc = L.coords(collar_[c]);
        std::vector<std::pair<int, double>> row;
        double total = 0.0;
        for (int dj = (n == 1 ? 0 : -walk_reach_); dj <= (n == 1 ? 0 : walk_reach_); ++dj)
            for (int di = -walk_reach_; di <= walk_reach_; ++di) {
                const int j = L.node_at(cc[0] + di, cc[1] + dj);
                if (!L.is_interior(j)) continue;
                const double w = walk_[(di + walk_reach_) + width * (dj + (n == 1 ? 0 : walk_reach_))];
                if (w <= 0.0) continue;
                row.emplace_back(j, w);
                total += w;
            }
        lu_[static_cast<std::size_t>(c) * m + c] += 1.0;
        for (auto [j, w] : row) {
            if (collar_slot_[j] >= 0)
                lu_[static_cast<std::size_t>(c) * m + collar_slot_[j]] -= w / total;
            else
                collar_to_core_[c].emplace_back(j, w / total);
        }
    }
    lu_factor(lu_, pivot_, m);
}

bool PhantomProcess::in_core(int node) const {
    return lattice_->is_interior(node) && collar_slot_[node] < 0;
}

GridField PhantomProcess::initial_field() const {
    GridField f = make_initial_field(lattice_, config_.initial);
    extension_->extend(f.values(), f.far_value());
    return f;
}

void PhantomProcess::reset(GridField& field) const {
    auto& v = field.values();
    std::vector<double> rhs(collar_.size());
    for (std::size_t c = 0; c < collar_.size(); ++c) {
        double sum = 0.0;
        for (auto [j, w] : collar_to_core_[c]) sum += w * v[j];
        rhs[c] = sum;
    }
    lu_solve(lu_, pivot_, rhs);
    for (std::size_t c = 0; c < collar_.size(); ++c) v[collar_[c]] = rhs[c];
    extension_->extend(v, field.far_value());
}

void PhantomProcess::step(GridField& field) const {
    const Lattice& L = *lattice_;
    const double p = config_.params.p();
    const int n = L.dim();
    const int width = 2 * walk_reach_ + 1;
    const auto& v = field.values();
    std::vector<double> next(core_.size());
    for (std::size_t k = 0; k < core_.size(); ++k) {
        const int i = core_[k];
        const auto ci = L.coords(i);
        double sum = 0.0;
        if (p > 0.0) {
            double jump = 0.0;
            for (int j = 0; j < L.size(); ++j) {
                const auto cj = L.coords(j);
                jump += (*jump_)(cj[0] - ci[0], cj[1] - ci[1]) * v[j];
            }
            sum += p * (jump_scale_ * jump + far_jump_[L.interior_slot(i)] * field.far_value());
        }
        if (p < 1.0) {
            double walk = 0.0;
            for (int dj = (n == 1 ? 0 : -walk_reach_); dj <= (n == 1 ? 0 : walk_reach_); ++dj)
                for (int di = -walk_reach_; di <= walk_reach_; ++di)
                    walk += walk_[(di + walk_reach_) + width * (dj + (n == 1 ? 0 : walk_reach_))] *
                            v[L.node_at(ci[0] + di, ci[1] + dj)];
            sum += (1.0 - p) * walk;
        }
        next[k] = sum;
    }
    auto& out = field.values();
    for (std::size_t k = 0; k < core_.size(); ++k) out[core_[k]] = next[k];
    reset(field);
}

std::vector<PhantomSnapshot> PhantomProcess::run() const {
    const double tau = config_.params.tau();
    std::vector<std::int64_t> steps;
    for (double t : config_.snapshot_times) {
        if (t < 0.0 || t > config_.final_time * (1.0 + 1e-12))
            throw ConfigError("snapshot times must lie in [0, T]");
        steps.push_back(steps_for_time(t, tau));
    }
    steps.push_back(steps_for_time(config_.final_time, tau));
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    GridField field = initial_field();
    std::vector<PhantomSnapshot> out;
    std::int64_t current = 0;
    for (std::int64_t target : steps) {
        for (; current < target; ++current) step(field);
        PhantomSnapshot snap;
        snap.step = current;
        snap.time = static_cast<double>(current) * tau;
        snap.mass = field.mass();
        snap.field = field;
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<PhantomSnapshot> run_phantom_process(const PhantomConfig& config) {
    return PhantomProcess(config).run();
}

}  // namespace niche
