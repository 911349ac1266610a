#pragma once

#include <cmath>

#include "niche/geometry.hpp"
#include "niche/point.hpp"
#include "niche/rng.hpp"

namespace niche {

/// Parameters of the discrete process: fractional order s, jump probability p
/// and jump cutoff h. The walk radius is lambda * h = h^s and the time step
/// tau = h^(2s), so (lambda h)^2 = tau.
class ProcessParams {
public:
    ProcessParams(double s, double p, double h);

    double s() const { return s_; }
    double p() const { return p_; }
    double h() const { return h_; }

    double lambda() const { return std::pow(h_, s_ - 1.0); }
    double tau() const { return std::pow(h_, 2.0 * s_); }
    double walk_radius() const { return std::pow(h_, s_); }
    /// The construction assumes lambda is an integer; non-integer values are
    /// accepted and reported here so callers can warn.
    bool lambda_is_integer() const;

    friend bool operator==(const ProcessParams&, const ProcessParams&) = default;

private:
    double s_, p_, h_;
};

/// Coefficients of the limit equation u_t = alpha Δu - beta (-Δ)^s u
/// (unnormalized fractional Laplacian).
struct EffectiveCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double c_o = 0.0;

    static EffectiveCoefficients from_process(const ProcessParams& params, int n);
};

/// c_o(n) = ∫_{B_1} |w|^2 dw = n vol(B_1) / (n + 2).
double second_moment_constant(int n);

/// ∫_{Ω \ B_cutoff(z)} |y - z|^(-n-2s) dy for z anywhere in R^n.
double kernel_mass(const Domain& domain, const Point& z, double cutoff, double s);

/// Normalizer mu_h(z) of the jump re-entry law for an exterior point z.
double jump_reentry_weight(const ProcessParams& params, const Domain& domain, const Point& z);

/// Density of the jump re-entry target y in Ω given an exit point z.
double jump_reentry_density(const ProcessParams& params, const Domain& domain, const Point& z,
                            const Point& y);

/// Transition density of the reflected walk component, x, y in Ω.
double walk_density(const ProcessParams& params, const Domain& domain, const Point& x,
                    const Point& y);

/// Transition density of the reflected jump component, x, y in Ω.
double jump_density(const ProcessParams& params, const Domain& domain, const Point& x,
                    const Point& y);

/// p * jump_density + (1 - p) * walk_density.
double combined_density(const ProcessParams& params, const Domain& domain, const Point& x,
                        const Point& y);

enum class MeasureKind { Walk, Jump, Combined };

/// Free-space step measures on all of R^n (no domain): uniform on the walk
/// ball, power law outside B_h for jumps.
double step_measure_density(const ProcessParams& params, int n, const Point& x, const Point& y,
                            MeasureKind kind);

/// Inverse-CDF map for the jump radius: rho = h (1 - u)^(-1/(2s)), rho > h.
double power_law_radius(double h, double s, double u);
double sample_power_law_radius(double h, double s, CounterRng& rng);

/// Uniform direction on the unit sphere in R^n.
Point sample_direction(int n, CounterRng& rng);

/// One walk step from x ∈ Ω (uniform in B_{λh}(x), re-entered uniformly in
/// Ω ∩ B_{λh}(y) on exit).
Point sample_walk_step(const ProcessParams& params, const Domain& domain, const Point& x,
                       CounterRng& rng);

/// Draw a re-entry target for a jump that left Ω at z.
Point sample_jump_reentry(const ProcessParams& params, const Domain& domain, const Point& z,
                          CounterRng& rng);

/// One jump step from x ∈ Ω with a single re-entry on exit.
Point sample_jump_step(const ProcessParams& params, const Domain& domain, const Point& x,
                       CounterRng& rng);

}  // namespace niche
