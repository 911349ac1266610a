#pragma once

#include <memory>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/kernels.hpp"
#include "niche/lattice.hpp"
#include "niche/particle_sim.hpp"

namespace niche {

struct GridSpec {
    double dx = 1.0 / 256.0;
    double band_width = 5.0;  ///< exterior band, in domain diameters

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Values on every node of a lattice: interior values are the state, the
/// exterior band and far-field value hold the extension.
class GridField {
public:
    GridField() = default;
    explicit GridField(std::shared_ptr<const Lattice> lattice);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& far_value() { return far_; }
    double far_value() const { return far_; }

    /// ∑ interior values * cell volume.
    double mass() const;
    /// Interior values in interior_nodes() order.
    std::vector<double> interior_values() const;

private:
    std::shared_ptr<const Lattice> lattice_;
    std::vector<double> values_;
    double far_ = 0.0;
};

/// Interior values for an initial condition. Point masses are deposited on
/// the nearest nodes with linear (cloud-in-cell) weights so the mean is kept.
GridField make_initial_field(std::shared_ptr<const Lattice> lattice, const InitialCondition& initial);

/// Kernel-weighted extension of the interior values to an arbitrary point x:
/// ∑ c_i(x) U_i / ∑ c_i(x), c_i(x) = ∫_{cell i} |x - y|^(-n-2s) dy over the
/// cells, excluding B_cutoff(x) (cutoff 0 gives the plain extension).
double extend_exterior(const GridField& field, double s, const Point& x, double cutoff = 0.0);

/// Extension restricted to Ω \ B_h(x).
double extend_exterior_punched(const GridField& field, double s, const Point& x, double h);

/// Unnormalized (-Δ)^s at an interior node, using the field's band values.
double fractional_laplacian(const GridField& field, const NonlocalOperator& op, int node);

/// Five-point (three-point in 1D) Laplacian with mirrored ghost values, which
/// imposes a zero normal derivative.
double classical_laplacian(const GridField& field, int node);

/// Largest one-sided normal difference quotient at the boundary layer.
double neumann_local_residual(const GridField& field);

/// Largest |∫_Ω (U(z) - U(y)) |z - y|^(-n-2s) dy| over the exterior band nodes.
double neumann_nonlocal_residual(const GridField& field, const NonlocalOperator& op);

struct FieldSnapshot {
    std::int64_t step = 0;
    double time = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double neumann_local = 0.0;
    double neumann_nonlocal = 0.0;
    GridField field;
};

/// Explicit solver for u_t = alpha Δu - beta (-Δ)^s u with the nonlocal
/// extension as exterior condition.
class PdeSolver {
public:
    PdeSolver(const Domain& domain, double s, EffectiveCoefficients coefficients, GridSpec grid);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
    const NonlocalOperator& op() const { return *op_; }
    const EffectiveCoefficients& coefficients() const { return coeff_; }

    GridField initial_field(const InitialCondition& initial) const;

    /// Explicit-Euler stability bound 0.9 / (2 n alpha / dx^2 + beta * max diagonal).
    double max_stable_dt() const;

    /// Fill band and far field from the interior values.
    void extend(GridField& field) const;

    /// One explicit Euler step followed by re-extension.
    void step(GridField& field, double dt) const;

    /// Integrate to each snapshot time (T always included), choosing dt so
    /// that every snapshot time is hit exactly.
    std::vector<FieldSnapshot> solve(GridField field, double final_time,
                                     std::vector<double> snapshot_times) const;

private:
    void advance(GridField& field, double dt, std::vector<double>& scratch) const;

    std::shared_ptr<const Lattice> lattice_;
    std::shared_ptr<const NonlocalOperator> op_;
    double s_;
    EffectiveCoefficients coeff_;
};

}  // namespace niche
