#include "niche/lattice.hpp"

#include <cmath>
#include <numbers>

#include "niche/error.hpp"
#include "niche/kernels.hpp"
#include "niche/quadrature.hpp"

namespace niche {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral over the unit square centred at 0 of |y|^(-2s).
double unit_square_moment(double s) {
    auto f = [s](double theta) { return std::pow(2.0 * std::cos(theta), -(2.0 - 2.0 * s)); };
    return 8.0 / (2.0 - 2.0 * s) * quad::integrate(f, 0.0, 0.25 * kPi, {}, {1e-14, 0.0, 1000});
}

}  // namespace

Lattice::Lattice(const Domain& domain, double dx, double band_width) : domain_(domain), dx_(dx) {
    if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
    if (!(band_width >= 0.0)) throw ConfigError("band width must be non-negative");
    if (!std::holds_alternative<Interval>(domain.shape()) &&
        !std::holds_alternative<Rectangle>(domain.shape()))
        throw PreconditionError("lattice discretizations support intervals and rectangles only");
    Point lo, hi;
    domain.bounding_box(lo, hi);
    origin_ = lo;
    for (int k = 0; k < domain.dim(); ++k) {
        const double n = (hi[k] - lo[k]) / dx;
        const double rounded = std::round(n);
        if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
            throw ConfigError("grid spacing must divide the domain extent into whole cells");
        cells_[k] = static_cast<int>(rounded);
    }
    band_ = static_cast<int>(std::ceil(band_width * domain.diameter() / dx - 1e-9));
    box_lo_ = lo;
    box_hi_ = hi;
    for (int k = 0; k < domain.dim(); ++k) {
        box_lo_[k] = lo[k] - band_ * dx;
        box_hi_[k] = lo[k] + (cells_[k] + band_) * dx;
    }
    slot_.assign(size(), -1);
    for (int node = 0; node < size(); ++node) {
        const auto c = coords(node);
        bool inside = c[0] >= band_ && c[0] < band_ + cells_[0];
        if (dim() == 2) inside = inside && c[1] >= band_ && c[1] < band_ + cells_[1];
        if (inside) {
            slot_[node] = static_cast<int>(interior_.size());
            interior_.push_back(node);
        } else {
            exterior_.push_back(node);
        }
    }
}

Point Lattice::position(int node) const {
    const auto c = coords(node);
    if (dim() == 1) return Point{origin_[0] + (c[0] - band_ + 0.5) * dx_};
    return Point{origin_[0] + (c[0] - band_ + 0.5) * dx_, origin_[1] + (c[1] - band_ + 0.5) * dx_};
}

int Lattice::locate(const Point& x) const {
    int idx[2] = {0, 0};
    for (int k = 0; k < dim(); ++k) {
        const double u = (x[k] - box_lo_[k]) / dx_;
        if (!(u >= 0.0 && u <= extent(k))) return -1;
        idx[k] = std::min(extent(k) - 1, static_cast<int>(u));
    }
    return node_at(idx[0], idx[1]);
}

HistogramGrid Lattice::interior_grid() const {
    Point lo, hi;
    domain_.bounding_box(lo, hi);
    return HistogramGrid(lo, hi, cells_);
}

double cell_kernel_integral(const Point& lo, const Point& hi, const Point& x, double s,
                            double cutoff) {
    if (lo.dim() == 1) return kernel_mass(Domain::interval(lo[0], hi[0]), x, cutoff, s);
    return kernel_mass(Domain::rectangle(lo, hi), x, cutoff, s);
}

CellKernelTable::CellKernelTable(int dim, int max_i, int max_j, double dx, double s, double cutoff)
    : dim_(dim), max_i_(max_i), max_j_(dim == 1 ? 0 : max_j) {
    const double scale = std::pow(dx, -2.0 * s);
    const double c = cutoff / dx;
    w_.assign(static_cast<std::size_t>(max_i_ + 1) * (max_j_ + 1), 0.0);
    for (int j = 0; j <= max_j_; ++j)
        for (int i = 0; i <= max_i_; ++i) {
            if (i == 0 && j == 0 && c <= 0.0) continue;
            double value;
            if (dim == 1) {
                value = cell_kernel_integral(Point{i - 0.5}, Point{i + 0.5}, Point{0.0}, s, c);
            } else if (j > i && i <= max_j_ && j <= max_i_) {
                value = w_[j + static_cast<std::size_t>(max_i_ + 1) * i];  // symmetric in (i, j)
            } else {
                value = cell_kernel_integral(Point{i - 0.5, j - 0.5}, Point{i + 0.5, j + 0.5},
                                             Point{0.0, 0.0}, s, c);
            }
            w_[i + static_cast<std::size_t>(max_i_ + 1) * j] = value;
        }
    for (double& v : w_) v *= scale;
}

double CellKernelTable::operator()(int di, int dj) const {
    di = std::abs(di);
    dj = std::abs(dj);
    return w_[di + static_cast<std::size_t>(max_i_ + 1) * dj];
}

double far_field_weight(const Point& lo, const Point& hi, const Point& x, double s) {
    if (x.dim() == 1) return (std::pow(x[0] - lo[0], -2.0 * s) + std::pow(hi[0] - x[0], -2.0 * s)) / (2.0 * s);
    const Domain box = Domain::rectangle(lo, hi);
    auto ray = [&](double theta) {
        double t0, t1;
        box.ray_span(x, Point{std::cos(theta), std::sin(theta)}, t0, t1);
        return std::pow(t1, -2.0 * s) / (2.0 * s);
    };
    return quad::integrate(ray, 0.0, 2.0 * kPi, box.corner_angles(x), {1e-12, 0.0, 2000});
}

NonlocalOperator::NonlocalOperator(std::shared_ptr<const Lattice> lattice, double s)
    : lattice_(std::move(lattice)),
      s_(s),
      table_(lattice_->dim(), lattice_->extent(0) - 1, lattice_->extent(1) - 1, lattice_->dx(), s, 0.0) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    const Lattice& L = *lattice_;
    const double dx = L.dx();
    if (L.dim() == 1)
        c_loc_ = std::pow(0.5 * dx, 2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * dx * dx);
    else
        c_loc_ = unit_square_moment(s) * std::pow(dx, 2.0 - 2.0 * s) / (4.0 * dx * dx);

    const auto& interior = L.interior_nodes();
    far_w_.resize(interior.size());
    far_norm_ = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
        far_w_[k] = far_field_weight(L.box_lo(), L.box_hi(), L.position(interior[k]), s);
        far_norm_ += far_w_[k];
    }

    const auto& exterior = L.exterior_nodes();
    ext_norm_.resize(exterior.size());
    for (std::size_t e = 0; e < exterior.size(); ++e) {
        double sum = 0.0;
        for (int i : interior) sum += weight(exterior[e], i);
        ext_norm_[e] = sum;
    }

    max_diag_ = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const int i = interior[k];
        double d = far_w_[k];
        for (int j = 0; j < L.size(); ++j)
            if (j != i) d += weight(i, j);
        const auto c = L.coords(i);
        for (int axis = 0; axis < L.dim(); ++axis)
            for (int step : {-1, 1}) {
                auto n = c;
                n[axis] += step;
                if (L.is_interior(L.node_at(n[0], n[1]))) d += c_loc_;
            }
        max_diag_ = std::max(max_diag_, d);
    }
}

double NonlocalOperator::weight(int a, int b) const {
    if (a == b) return 0.0;
    const auto ca = lattice_->coords(a), cb = lattice_->coords(b);
    return table_(ca[0] - cb[0], ca[1] - cb[1]);
}

double NonlocalOperator::far_weight(int node) const {
    const int slot = lattice_->interior_slot(node);
    if (slot < 0) throw PreconditionError("far_weight: node is not interior");
    return far_w_[slot];
}

void NonlocalOperator::extend(std::vector<double>& values, double& far) const {
    const Lattice& L = *lattice_;
    if (static_cast<int>(values.size()) != L.size())
        throw PreconditionError("extend: value vector does not match the lattice");
    const auto& interior = L.interior_nodes();
    const auto& exterior = L.exterior_nodes();
    for (std::size_t e = 0; e < exterior.size(); ++e) {
        double sum = 0.0;
        for (int i : interior) sum += weight(exterior[e], i) * values[i];
        values[exterior[e]] = sum / ext_norm_[e];
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) sum += far_w_[k] * values[interior[k]];
    far = sum / far_norm_;
}

double NonlocalOperator::apply(const std::vector<double>& values, double far, int node) const {
    const Lattice& L = *lattice_;
    const int slot = L.interior_slot(node);
    if (slot < 0) throw PreconditionError("fractional Laplacian is evaluated at interior nodes only");
    const double u = values[node];
    double total = far_w_[slot] * (u - far);
    const auto c = L.coords(node);
    if (L.dim() == 1) {
        for (int j = 0; j < L.size(); ++j)
            if (j != node) total += table_(j - c[0]) * (u - values[j]);
    } else {
        for (int j = 0; j < L.size(); ++j)
            if (j != node) {
                const auto cj = L.coords(j);
                total += table_(cj[0] - c[0], cj[1] - c[1]) * (u - values[j]);
            }
    }
    for (int axis = 0; axis < L.dim(); ++axis)
        for (int step : {-1, 1}) {
            auto n = c;
            n[axis] += step;
            const int nb = L.node_at(n[0], n[1]);
            if (L.is_interior(nb)) total += c_loc_ * (u - values[nb]);
        }
    return total;
}

void NonlocalOperator::apply_all(const std::vector<double>& values, double far,
                                 std::vector<double>& out) const {
    const auto& interior = lattice_->interior_nodes();
    out.resize(interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k) out[k] = apply(values, far, interior[k]);
}

}  // namespace niche
