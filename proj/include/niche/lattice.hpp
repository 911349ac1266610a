#pragma once

#include <array>
#include <memory>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/particle_sim.hpp"

namespace niche {

/// Uniform cell-centred lattice on an axis-aligned domain (Interval or
/// Rectangle), padded by `band` exterior cells on every side. Cells tile the
/// domain exactly; the region beyond the padded box is the far field.
class Lattice {
public:
    /// band_width is measured in domain diameters.
    Lattice(const Domain& domain, double dx, double band_width);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    double dx() const { return dx_; }
    double cell_volume() const { return dim() == 1 ? dx_ : dx_ * dx_; }
    int interior_cells(int axis) const { return cells_[axis]; }
    int band() const { return band_; }
    int extent(int axis) const { return axis < dim() ? cells_[axis] + 2 * band_ : 1; }
    int size() const { return extent(0) * extent(1); }

    int node_at(int i, int j = 0) const { return i + extent(0) * j; }
    std::array<int, 2> coords(int node) const { return {node % extent(0), node / extent(0)}; }
    Point position(int node) const;
    bool is_interior(int node) const { return slot_[node] >= 0; }
    /// Position of a node in interior_nodes(), or -1 for exterior nodes.
    int interior_slot(int node) const { return slot_[node]; }
    const std::vector<int>& interior_nodes() const { return interior_; }
    const std::vector<int>& exterior_nodes() const { return exterior_; }

    /// Lattice node whose cell contains x, or -1 outside the padded box.
    int locate(const Point& x) const;

    /// Corners of the padded box.
    const Point& box_lo() const { return box_lo_; }
    const Point& box_hi() const { return box_hi_; }

    /// Histogram cells matching the interior cells.
    HistogramGrid interior_grid() const;

private:
    Domain domain_;
    double dx_;
    std::array<int, 2> cells_{1, 1};
    int band_ = 0;
    Point origin_;  // lower corner of the domain
    Point box_lo_, box_hi_;
    std::vector<int> slot_, interior_, exterior_;
};

/// ∫ |y|^(-n-2s) over the lattice cell at integer offset (di, dj), excluding
/// B_cutoff(0). Depends only on |di|, |dj|, so it is tabulated once.
class CellKernelTable {
public:
    CellKernelTable(int dim, int max_i, int max_j, double dx, double s, double cutoff);
    double operator()(int di, int dj = 0) const;

private:
    int dim_, max_i_, max_j_;
    std::vector<double> w_;
};

/// ∫ over the exterior of the box [lo, hi] of |x - y|^(-n-2s) dy.
double far_field_weight(const Point& lo, const Point& hi, const Point& x, double s);

/// ∫ over the cell [lo, hi] of |x - y|^(-n-2s) dy, excluding B_cutoff(x).
double cell_kernel_integral(const Point& lo, const Point& hi, const Point& x, double s,
                            double cutoff = 0.0);

/// Discrete unnormalized fractional Laplacian on a lattice. Interior values
/// are coupled through cell-integrated kernel weights; exterior band values
/// are the kernel-weighted extension of the interior values computed with the
/// same weights, which makes the scheme exactly mass conserving. The near
/// field of each node is handled by a second-difference correction with
/// mirrored (Neumann) neighbours.
class NonlocalOperator {
public:
    NonlocalOperator(std::shared_ptr<const Lattice> lattice, double s);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
    double s() const { return s_; }

    /// Kernel weight between two distinct nodes.
    double weight(int a, int b) const;
    double local_coefficient() const { return c_loc_; }
    /// Weight of the far field seen from an interior node.
    double far_weight(int node) const;

    /// Overwrite exterior band values and the far-field value with the
    /// extension of the interior values.
    void extend(std::vector<double>& values, double& far) const;

    /// (-Δ)^s U at an interior node.
    double apply(const std::vector<double>& values, double far, int node) const;
    /// Same for every interior node, in interior_nodes() order.
    void apply_all(const std::vector<double>& values, double far, std::vector<double>& out) const;

    /// Largest diagonal entry of the discrete operator.
    double max_diagonal() const { return max_diag_; }

private:
    std::shared_ptr<const Lattice> lattice_;
    double s_;
    CellKernelTable table_;
    double c_loc_ = 0.0;
    std::vector<double> far_w_;       // per interior slot
    double far_norm_ = 0.0;
    std::vector<double> ext_norm_;    // per exterior node (index into exterior_nodes())
    double max_diag_ = 0.0;
};

}  // namespace niche
