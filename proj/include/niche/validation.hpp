#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "niche/geometry.hpp"
#include "niche/kernels.hpp"
#include "niche/particle_sim.hpp"
#include "niche/pde_solver.hpp"

namespace niche {

struct ResidualEntry {
    std::string id;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string method;
    std::uint64_t seed = 0;
};

/// pass is set from |computed - reference| <= tolerance.
ResidualEntry make_entry(std::string id, double computed, double reference, double tolerance,
                         std::string method, std::uint64_t seed = 0);

struct ResidualReport {
    std::vector<ResidualEntry> entries;

    void add(ResidualEntry e) { entries.push_back(std::move(e)); }
    bool all_pass() const;
};

/// ∫_Ω P_W(x -> y) dy for each point; the entry reports the worst point.
/// 1D integrates walk_density directly. 2D integrates over exit points first
/// and checks the re-entry law against an independent area quadrature.
ResidualEntry check_walk_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points, double tolerance = 1e-6);

/// Same for P_J. Default tolerance 1e-6 in 1D and 1e-4 in 2D.
ResidualEntry check_jump_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points, double tolerance = -1.0);

/// Per-point normalization values, in the order of `points`.
std::vector<double> walk_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points);
std::vector<double> jump_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points);

/// ∫_{B_1} |w|^2 dw in closed form.
double compute_c_o(int n);
/// Closed form against radial quadrature.
ResidualEntry check_c_o(int n);

struct HalfspaceConstants {
    int n = 1;
    double c_star = 0.0;
    double c_star_stderr = 0.0;        ///< 0 for the closed form
    std::vector<double> tangential;     ///< tangential components of the boundary vector
    std::vector<double> tangential_stderr;
    double a_0 = 0.0;                   ///< |Π ∩ B_1|
    double b_0 = 0.0;                   ///< -∫_{Π∩B_1} z_n dz
    double varpi = 0.0;                 ///< (n-1)-volume of the unit ball of R^(n-1)
    std::string method;
};

/// Closed form for n = 1, Monte Carlo for n >= 2. The halfspace is
/// Π = {z_n < 0} with outward normal e_n; the boundary vector equals
/// -c_star e_n.
HalfspaceConstants compute_c_star(int n, std::int64_t samples = 10'000'000, std::uint64_t seed = 1);
/// Monte Carlo estimate for any n >= 1 (used to cross-check the 1D closed form).
HalfspaceConstants compute_c_star_monte_carlo(int n, std::int64_t samples, std::uint64_t seed);
/// Deterministic c_star by slicing the halfspace along the normal.
double c_star_quadrature(int n);

/// Largest one-sided normal difference quotient at the boundary.
ResidualEntry check_neumann_local(const GridField& field, double tolerance);
/// Residual ratio between a field on dx/2 and one on dx; reference 0.5 ± 0.1.
ResidualEntry check_neumann_local_refinement(const GridField& coarse, const GridField& fine);

/// ∫_Ω (U(x) - U(y)) |x - y|^(-n-2s) dy at exterior probes, with U(x) the band
/// value of the lattice node containing the probe, evaluated at that node.
/// Centres of up to `count` exterior band nodes, spread evenly through the band.
std::vector<Point> band_probes(const Lattice& lattice, std::size_t count);

std::vector<double> neumann_nonlocal_residuals(const GridField& field, double s,
                                               const std::vector<Point>& probes);
ResidualEntry check_neumann_nonlocal(const GridField& field, double s,
                                     const std::vector<Point>& probes, double tolerance = 1e-8);

/// ∑ |hist - field| * cell volume over the interior cells.
double compare_particle_pde(const HistogramEstimate& hist, const GridField& field);

/// ∫_{R^n} dπ(y; x) by radial quadrature with a mapped tail, for the given
/// measure kind. The entry reports the worst probe.
ResidualEntry check_pi_normalization(const ProcessParams& params, const std::vector<Point>& probes,
                                     MeasureKind kind, double tolerance = 1e-8);

struct ValidationSuiteConfig {
    ProcessParams params{0.5, 0.5, 1e-3};
    Domain domain = Domain::interval(0.0, 1.0);
    GridSpec grid;
    double final_time = 0.1;
    InitialCondition initial = InitialCondition::point_mass(Point{0.5});
    std::uint64_t seed = 1;
    std::int64_t c_star_samples = 10'000'000;
};

/// Every identity check that applies to the configured domain.
ResidualReport run_validation_suite(const ValidationSuiteConfig& config);

}  // namespace niche
