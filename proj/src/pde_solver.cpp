#include "niche/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "niche/error.hpp"

namespace niche {

GridField::GridField(std::shared_ptr<const Lattice> lattice)
    : lattice_(std::move(lattice)), values_(lattice_->size(), 0.0) {}

double GridField::mass() const {
    double m = 0.0;
    for (int node : lattice_->interior_nodes()) m += values_[node];
    return m * lattice_->cell_volume();
}

std::vector<double> GridField::interior_values() const {
    std::vector<double> out;
    out.reserve(lattice_->interior_nodes().size());
    for (int node : lattice_->interior_nodes()) out.push_back(values_[node]);
    return out;
}

GridField make_initial_field(std::shared_ptr<const Lattice> lattice, const InitialCondition& initial) {
    GridField field(lattice);
    const Lattice& L = *lattice;
    auto& v = field.values();
    switch (initial.kind) {
        case InitialCondition::Kind::PointMass: {
            const Point& x0 = initial.x0;
            if (x0.dim() != L.dim() || !L.domain().contains(x0))
                throw ConfigError("initial point lies outside the domain");
            Point lo, hi;
            L.domain().bounding_box(lo, hi);
            int base[2] = {0, 0};
            double frac[2] = {0.0, 0.0};
            for (int k = 0; k < L.dim(); ++k) {
                const double u = (x0[k] - lo[k]) / L.dx() - 0.5;
                base[k] = static_cast<int>(std::floor(u));
                frac[k] = u - base[k];
            }
            const double scale = 1.0 / L.cell_volume();
            const int ny = L.dim() == 2 ? 2 : 1;
            for (int b = 0; b < ny; ++b)
                for (int a = 0; a < 2; ++a) {
                    double w = a ? frac[0] : 1.0 - frac[0];
                    int idx[2] = {std::clamp(base[0] + a, 0, L.interior_cells(0) - 1), 0};
                    if (L.dim() == 2) {
                        w *= b ? frac[1] : 1.0 - frac[1];
                        idx[1] = std::clamp(base[1] + b, 0, L.interior_cells(1) - 1) + L.band();
                    }
                    v[L.node_at(idx[0] + L.band(), idx[1])] += w * scale;
                }
            break;
        }
        case InitialCondition::Kind::Uniform: {
            const double value = 1.0 / L.domain().volume();
            for (int node : L.interior_nodes()) v[node] = value;
            break;
        }
        case InitialCondition::Kind::Function:
            if (!initial.density) throw ConfigError("function initial condition needs a density");
            for (int node : L.interior_nodes()) v[node] = initial.density(L.position(node));
            break;
    }
    return field;
}

double extend_exterior(const GridField& field, double s, const Point& x, double cutoff) {
    const Lattice& L = field.lattice();
    if (x.dim() != L.dim()) throw PreconditionError("extend_exterior: dimension mismatch");
    const double half = 0.5 * L.dx();
    double num = 0.0, den = 0.0;
    for (int node : L.interior_nodes()) {
        const Point c = L.position(node);
        Point lo = c, hi = c;
        for (int k = 0; k < L.dim(); ++k) {
            lo[k] -= half;
            hi[k] += half;
        }
        const double w = cell_kernel_integral(lo, hi, x, s, cutoff);
        num += w * field.values()[node];
        den += w;
    }
    if (!(den > 0.0) || !std::isfinite(den))
        throw NumericalError("extend_exterior: kernel weights vanish or diverge at this point");
    return num / den;
}

double extend_exterior_punched(const GridField& field, double s, const Point& x, double h) {
    if (!(h > 0.0)) throw PreconditionError("extend_exterior_punched: cutoff must be positive");
    return extend_exterior(field, s, x, h);
}

double fractional_laplacian(const GridField& field, const NonlocalOperator& op, int node) {
    return op.apply(field.values(), field.far_value(), node);
}

double classical_laplacian(const GridField& field, int node) {
    const Lattice& L = field.lattice();
    if (!L.is_interior(node)) throw PreconditionError("classical Laplacian needs an interior node");
    const auto c = L.coords(node);
    const auto& v = field.values();
    double sum = 0.0;
    for (int axis = 0; axis < L.dim(); ++axis)
        for (int step : {-1, 1}) {
            auto n = c;
            n[axis] += step;
            const int nb = L.node_at(n[0], n[1]);
            // Mirrored ghost: an exterior neighbour contributes zero difference.
            if (L.is_interior(nb)) sum += v[nb] - v[node];
        }
    return sum / (L.dx() * L.dx());
}

double neumann_local_residual(const GridField& field) {
    const Lattice& L = field.lattice();
    const auto& v = field.values();
    double worst = 0.0;
    for (int node : L.interior_nodes()) {
        const auto c = L.coords(node);
        for (int axis = 0; axis < L.dim(); ++axis)
            for (int step : {-1, 1}) {
                auto out = c, in = c;
                out[axis] += step;
                in[axis] -= step;
                if (L.is_interior(L.node_at(out[0], out[1]))) continue;
                const int inner = L.node_at(in[0], in[1]);
                if (!L.is_interior(inner)) continue;
                worst = std::max(worst, std::abs(v[node] - v[inner]) / L.dx());
            }
    }
    return worst;
}

double neumann_nonlocal_residual(const GridField& field, const NonlocalOperator& op) {
    const Lattice& L = field.lattice();
    const auto& v = field.values();
    double worst = 0.0;
    for (int e : L.exterior_nodes()) {
        double r = 0.0;
        for (int i : L.interior_nodes()) r += op.weight(e, i) * (v[e] - v[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

PdeSolver::PdeSolver(const Domain& domain, double s, EffectiveCoefficients coefficients, GridSpec grid)
    : lattice_(std::make_shared<Lattice>(domain, grid.dx, grid.band_width)), s_(s), coeff_(coefficients) {
    if (coefficients.alpha < 0.0 || coefficients.beta < 0.0)
        throw ConfigError("diffusion coefficients must be non-negative");
    op_ = std::make_shared<NonlocalOperator>(lattice_, s);
}

GridField PdeSolver::initial_field(const InitialCondition& initial) const {
    GridField f = make_initial_field(lattice_, initial);
    extend(f);
    return f;
}

double PdeSolver::max_stable_dt() const {
    const double dx = lattice_->dx();
    const double rate = 2.0 * lattice_->dim() * coeff_.alpha / (dx * dx) + coeff_.beta * op_->max_diagonal();
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return 0.9 / rate;
}

void PdeSolver::extend(GridField& field) const { op_->extend(field.values(), field.far_value()); }

void PdeSolver::advance(GridField& field, double dt, std::vector<double>& scratch) const {
    const auto& interior = lattice_->interior_nodes();
    scratch.resize(interior.size());
    auto& v = field.values();
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const int node = interior[k];
        double rhs = 0.0;
        if (coeff_.alpha > 0.0) rhs += coeff_.alpha * classical_laplacian(field, node);
        if (coeff_.beta > 0.0) rhs -= coeff_.beta * op_->apply(v, field.far_value(), node);
        scratch[k] = v[node] + dt * rhs;
    }
    for (std::size_t k = 0; k < interior.size(); ++k) v[interior[k]] = scratch[k];
    if (coeff_.beta > 0.0) extend(field);
}

void PdeSolver::step(GridField& field, double dt) const {
    if (field.lattice_ptr() != lattice_) throw PreconditionError("step: field belongs to another lattice");
    if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
    std::vector<double> scratch;
    advance(field, dt, scratch);
    extend(field);
}

std::vector<FieldSnapshot> PdeSolver::solve(GridField field, double final_time,
                                            std::vector<double> snapshot_times) const {
    if (field.lattice_ptr() != lattice_) throw PreconditionError("solve: field belongs to another lattice");
    if (!(final_time >= 0.0)) throw ConfigError("final time must be non-negative");
    for (double t : snapshot_times)
        if (t < 0.0 || t > final_time) throw ConfigError("snapshot times must lie in [0, T]");
    snapshot_times.push_back(final_time);
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()), snapshot_times.end());

    extend(field);
    const double dt_max = max_stable_dt();
    std::vector<FieldSnapshot> out;
    std::vector<double> scratch;
    double now = 0.0, dt = 0.0;
    std::int64_t steps = 0;
    for (double target : snapshot_times) {
        const double span = target - now;
        if (span > 0.0) {
            const auto n = std::isfinite(dt_max)
                               ? std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / dt_max - 1e-9)))
                               : 1;
            dt = span / static_cast<double>(n);
            for (std::int64_t k = 0; k < n; ++k) advance(field, dt, scratch);
            steps += n;
            now = target;
            extend(field);
        }
        FieldSnapshot snap;
        snap.step = steps;
        snap.time = target;
        snap.dt = dt;
        snap.mass = field.mass();
        snap.neumann_local = neumann_local_residual(field);
        snap.neumann_nonlocal = neumann_nonlocal_residual(field, *op_);
        snap.field = field;
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace niche
