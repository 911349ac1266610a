#include "niche/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "niche/error.hpp"
#include "niche/quadrature.hpp"

namespace niche {

namespace {

constexpr double kPi = std::numbers::pi;

Point unit(double theta) { return Point{std::cos(theta), std::sin(theta)}; }

// Exit distance of the ray x + t u from a convex domain containing x.
double exit_distance(const Domain& domain, const Point& x, const Point& u) {
    double t0, t1;
    if (!domain.ray_span(x, u, t0, t1)) return 0.0;
    return t1;
}

// Angles at which either end of the ray span from x crosses `radius`, plus
// the corner angles. The polar integrands below have kinks there.
std::vector<double> polar_breaks(const Domain& domain, const Point& x, double radius) {
    std::vector<double> breaks = domain.corner_angles(x);
    if (domain.distance_to_boundary(x) >= radius) return breaks;
    auto span_end = [&](double theta, int which) {
        double t0, t1;
        if (!domain.ray_span(x, unit(theta), t0, t1)) return std::numeric_limits<double>::infinity();
        return (which == 0 ? t0 : t1) - radius;
    };
    const int samples = 720;
    const double step = 2.0 * kPi / samples;
    for (int which = 0; which < 2; ++which)
        for (int k = 0; k < samples; ++k) {
            double a = k * step, b = a + step;
            const bool below = span_end(a, which) < 0.0;
            if (below == (span_end(b, which) < 0.0)) continue;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                if ((span_end(m, which) < 0.0) == below) a = m;
                else b = m;
            }
            breaks.push_back(0.5 * (a + b));
        }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double u, double v) { return v - u < 1e-12; }),
                 breaks.end());
    return breaks;
}

// |Ω ∩ B_r(z)| by polar integration about z.
double area_in_ball(const Domain& domain, const Point& z, double r) {
    auto f = [&](double phi) {
        double t0, t1;
        if (!domain.ray_span(z, unit(phi), t0, t1)) return 0.0;
        t1 = std::min(t1, r);
        t0 = std::max(t0, 0.0);
        return t1 > t0 ? 0.5 * (t1 * t1 - t0 * t0) : 0.0;
    };
    return quad::integrate(f, 0.0, 2.0 * kPi, polar_breaks(domain, z, r), {1e-10, 1e-14, 4000});
}

// ∫_{Ω \ B_h(z)} |y - z|^(-2-2s) dy with numerical radial integrals.
double kernel_mass_numeric(const Domain& domain, const Point& z, double h, double s) {
    auto f = [&](double phi) {
        double t0, t1;
        if (!domain.ray_span(z, unit(phi), t0, t1)) return 0.0;
        const double lo = std::max(t0, h);
        if (!(t1 > lo)) return 0.0;
        auto g = [s](double rho) { return std::pow(rho, -1.0 - 2.0 * s); };
        return quad::integrate(g, lo, t1, {}, {1e-11, 0.0, 200});
    };
    return quad::integrate(f, 0.0, 2.0 * kPi, polar_breaks(domain, z, h), {1e-9, 0.0, 4000});
}

double worst_deviation(const std::vector<double>& values, double reference) {
    double worst = reference;
    for (double v : values)
        if (std::abs(v - reference) > std::abs(worst - reference)) worst = v;
    return worst;
}

void bounds(const Domain& domain, double& a, double& b) {
    Point lo, hi;
    domain.bounding_box(lo, hi);
    a = lo[0];
    b = hi[0];
}

}  // namespace

ResidualEntry make_entry(std::string id, double computed, double reference, double tolerance,
                         std::string method, std::uint64_t seed) {
    ResidualEntry e;
    e.id = std::move(id);
    e.computed = computed;
    e.reference = reference;
    e.tolerance = tolerance;
    e.pass = std::abs(computed - reference) <= tolerance;
    e.method = std::move(method);
    e.seed = seed;
    return e;
}

bool ResidualReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.pass; });
}

std::vector<double> walk_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points) {
    const int n = domain.dim();
    const double r = params.walk_radius();
    std::vector<double> out;
    for (const Point& x : points) {
        if (!domain.contains(x)) throw PreconditionError("normalization points must lie in the domain");
        if (n == 1) {
            double a, b;
            bounds(domain, a, b);
            auto f = [&](double y) { return walk_density(params, domain, x, Point{y}); };
            out.push_back(quad::integrate(f, a, b, std::vector<double>{x[0] - r, x[0] + r, a + r, b - r, a + 2 * r, b - 2 * r},
                                          {1e-11, 0.0, 4000}));
            continue;
        }
        if (n != 2) throw PreconditionError("walk normalization: 1D and 2D domains only");
        const double ball = kPi * r * r;
        const double direct = ball_intersection_volume(domain, x, r) / ball;
        // Exit points z ∈ B_r(x) \ Ω, each re-entering with total mass
        // |Ω ∩ B_r(z)| / |Ω ∩ B_r(z)|, numerator by polar quadrature.
        auto radial = [&](double theta) {
            const Point u = unit(theta);
            const double t = exit_distance(domain, x, u);
            if (t >= r) return 0.0;
            auto g = [&](double rho) {
                const Point z = x + u * rho;
                return rho * area_in_ball(domain, z, r) / ball_intersection_volume(domain, z, r);
            };
            return quad::integrate(g, t, r, {}, {1e-9, 0.0, 200});
        };
        const double outside = quad::integrate(radial, 0.0, 2.0 * kPi, polar_breaks(domain, x, r), {1e-8, 0.0, 2000});
        out.push_back(direct + outside / ball);
    }
    return out;
}

std::vector<double> jump_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points) {
    const int n = domain.dim();
    const double s = params.s(), h = params.h();
    const double scale = 2.0 * s * std::pow(h, 2.0 * s) / unit_sphere_area(n);
    std::vector<double> out;
    for (const Point& x : points) {
        if (!domain.contains(x)) throw PreconditionError("normalization points must lie in the domain");
        if (n == 1) {
            double a, b;
            bounds(domain, a, b);
            auto f = [&](double y) { return jump_density(params, domain, x, Point{y}); };
            out.push_back(quad::integrate(f, a, b, std::vector<double>{x[0] - h, x[0] + h, a + h, b - h}, {1e-11, 0.0, 4000}));
            continue;
        }
        if (n != 2) throw PreconditionError("jump normalization: 1D and 2D domains only");
        const double direct = scale * kernel_mass(domain, x, h, s);
        // Exit points z outside Ω and B_h(x), weighted by the re-entry mass
        // m(z) / mu(z) with m from numerical radial integrals.
        auto radial = [&](double theta) {
            const Point u = unit(theta);
            const double start = std::max(h, exit_distance(domain, x, u));
            auto g = [&](double rho) {
                const Point z = x + u * rho;
                const double mu = kernel_mass(domain, z, h, s);
                if (!(mu > 0.0)) return 0.0;
                return rho * std::pow(rho, -2.0 - 2.0 * s) * kernel_mass_numeric(domain, z, h, s) / mu;
            };
            return quad::integrate_tail(g, start, start, 2.0 * s, {1e-8, 0.0, 200});
        };
        const double outside = quad::integrate(radial, 0.0, 2.0 * kPi, polar_breaks(domain, x, h), {1e-7, 0.0, 2000});
        out.push_back(direct + scale * outside);
    }
    return out;
}

ResidualEntry check_walk_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points, double tolerance) {
    const auto values = walk_normalization(params, domain, points);
    return make_entry("walk_normalization", worst_deviation(values, 1.0), 1.0, tolerance,
                      domain.dim() == 1 ? "adaptive quadrature of the walk density"
                                        : "exit-point quadrature with polar re-entry areas");
}

ResidualEntry check_jump_normalization(const ProcessParams& params, const Domain& domain,
                                       const std::vector<Point>& points, double tolerance) {
    if (tolerance < 0.0) tolerance = domain.dim() == 1 ? 1e-6 : 1e-4;
    const auto values = jump_normalization(params, domain, points);
    return make_entry("jump_normalization", worst_deviation(values, 1.0), 1.0, tolerance,
                      domain.dim() == 1 ? "adaptive quadrature of the jump density"
                                        : "exit-point quadrature with numerical re-entry mass");
}

double compute_c_o(int n) {
    if (n < 1) throw PreconditionError("compute_c_o: n must be positive");
    return second_moment_constant(n);
}

ResidualEntry check_c_o(int n) {
    auto f = [n](double rho) { return unit_sphere_area(n) * std::pow(rho, n + 1); };
    const double numeric = quad::integrate(f, 0.0, 1.0, {}, {1e-14, 0.0, 100});
    return make_entry("c_o_n" + std::to_string(n), compute_c_o(n), numeric, 1e-12, "closed form vs radial quadrature");
}

namespace {

HalfspaceConstants halfspace_base(int n) {
    if (n < 1 || n > 4) throw PreconditionError("halfspace constants: 1 <= n <= 4");
    HalfspaceConstants c;
    c.n = n;
    c.a_0 = 0.5 * unit_ball_volume(n);
    c.b_0 = unit_ball_volume(n - 1) / (n + 1.0);
    c.varpi = unit_ball_volume(n - 1);
    c.tangential.assign(n - 1, 0.0);
    c.tangential_stderr.assign(n - 1, 0.0);
    return c;
}

}  // namespace

HalfspaceConstants compute_c_star_monte_carlo(int n, std::int64_t samples, std::uint64_t seed) {
    if (samples < 2) throw ConfigError("c_star: need at least two samples");
    HalfspaceConstants c = halfspace_base(n);
    std::vector<double> sum(n, 0.0), sum2(n, 0.0);
    for (std::int64_t i = 0; i < samples; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i), 0);
        // Z uniform in the upper half ball.
        Point z = sample_direction(n, rng) * std::pow(rng.uniform(), 1.0 / n);
        z[n - 1] = std::abs(z[n - 1]);
        const double t = z[n - 1];
        // Y uniform in {y ∈ B_1 : y_n < -t}: last coordinate by rejection on
        // the slice volume, the rest uniform in the slice.
        double yn = -1.0;
        for (;;) {
            yn = -t - (1.0 - t) * rng.uniform();
            if (n == 1) break;
            const double ratio = std::pow((1.0 - yn * yn) / (1.0 - t * t), 0.5 * (n - 1));
            if (rng.uniform() < ratio) break;
        }
        Point y(n);
        if (n > 1) {
            const double radius = std::sqrt(std::max(0.0, 1.0 - yn * yn));
            const Point w = sample_direction(n - 1, rng) * (radius * std::pow(rng.uniform(), 1.0 / (n - 1)));
            for (int k = 0; k < n - 1; ++k) y[k] = w[k];
        }
        y[n - 1] = yn;
        for (int k = 0; k < n; ++k) {
            const double g = y[k] + z[k];
            sum[k] += g;
            sum2[k] += g * g;
        }
    }
    const double N = static_cast<double>(samples);
    auto estimate = [&](int k, double& mean, double& err) {
        const double m = sum[k] / N;
        const double var = std::max(0.0, (sum2[k] / N - m * m) * N / (N - 1.0));
        mean = c.a_0 * m;
        err = c.a_0 * std::sqrt(var / N);
    };
    double mean, err;
    estimate(n - 1, mean, err);
    c.c_star = c.b_0 - mean;  // normal component is -b_0 + mean = -c_star
    c.c_star_stderr = err;
    for (int k = 0; k < n - 1; ++k) estimate(k, c.tangential[k], c.tangential_stderr[k]);
    c.method = "monte carlo";
    return c;
}

HalfspaceConstants compute_c_star(int n, std::int64_t samples, std::uint64_t seed) {
    if (n == 1) {
        HalfspaceConstants c = halfspace_base(1);
        // -∫_{-1}^0 y dy + ∫_0^1 (1 - z) / 2 dz.
        c.c_star = 0.75;
        c.method = "closed form";
        return c;
    }
    return compute_c_star_monte_carlo(n, samples, seed);
}

double c_star_quadrature(int n) {
    HalfspaceConstants c = halfspace_base(n);
    const double slice = unit_ball_volume(n - 1);
    auto section = [&](double y) { return slice * std::pow(std::max(0.0, 1.0 - y * y), 0.5 * (n - 1)); };
    auto second = [&](double t) {
        const double cap = quad::integrate(section, -1.0, -t, {}, {1e-13, 0.0, 200});
        if (!(cap > 0.0)) return 0.0;
        const double moment = -slice * std::pow(1.0 - t * t, 0.5 * (n + 1)) / (n + 1.0);
        return section(t) * (t + moment / cap);
    };
    return c.b_0 - quad::integrate(second, 0.0, 1.0, {}, {1e-11, 0.0, 1000});
}

ResidualEntry check_neumann_local(const GridField& field, double tolerance) {
    return make_entry("neumann_local", neumann_local_residual(field), 0.0, tolerance,
                      "one-sided normal difference at boundary cells");
}

ResidualEntry check_neumann_local_refinement(const GridField& coarse, const GridField& fine) {
    const double rc = neumann_local_residual(coarse), rf = neumann_local_residual(fine);
    if (!(rc > 0.0)) return make_entry("neumann_local_refinement", 0.5, 0.5, 0.1, "residual vanishes on both grids");
    return make_entry("neumann_local_refinement", rf / rc, 0.5, 0.1, "residual ratio dx/2 vs dx");
}

std::vector<Point> band_probes(const Lattice& lattice, std::size_t count) {
    std::vector<Point> out;
    const auto& nodes = lattice.exterior_nodes();
    if (count == 0 || nodes.empty()) return out;
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / count);
    for (std::size_t k = 0; k < nodes.size() && out.size() < count; k += stride)
        out.push_back(lattice.position(nodes[k]));
    return out;
}

std::vector<double> neumann_nonlocal_residuals(const GridField& field, double s,
                                               const std::vector<Point>& probes) {
    const Lattice& L = field.lattice();
    const double half = 0.5 * L.dx();
    std::vector<double> out;
    for (const Point& probe : probes) {
        if (probe.dim() != L.dim()) throw PreconditionError("probe has the wrong dimension");
        if (L.domain().contains(probe) || L.domain().distance_to_boundary(probe) == 0.0)
            throw PreconditionError("nonlocal Neumann probes must lie outside the closed domain");
        const int node = L.locate(probe);
        if (node < 0) throw PreconditionError("probe lies beyond the exterior band");
        if (L.is_interior(node)) throw PreconditionError("probe cell overlaps the domain");
        const Point x = L.position(node);
        const double ux = field.values()[node];
        double total = 0.0;
        for (int i : L.interior_nodes()) {
            Point lo = L.position(i), hi = lo;
            for (int k = 0; k < L.dim(); ++k) {
                lo[k] -= half;
                hi[k] += half;
            }
            total += cell_kernel_integral(lo, hi, x, s) * (ux - field.values()[i]);
        }
        out.push_back(total);
    }
    return out;
}

ResidualEntry check_neumann_nonlocal(const GridField& field, double s, const std::vector<Point>& probes,
                                     double tolerance) {
    const auto r = neumann_nonlocal_residuals(field, s, probes);
    return make_entry("neumann_nonlocal", worst_deviation(r, 0.0), 0.0, tolerance,
                      "cell-integrated kernel quadrature at exterior probes");
}

double compare_particle_pde(const HistogramEstimate& hist, const GridField& field) {
    const HistogramGrid grid = field.lattice().interior_grid();
    if (!hist.grid.matches(grid)) throw PreconditionError("histogram and field grids differ");
    const auto values = field.interior_values();
    if (values.size() != hist.density.size()) throw PreconditionError("histogram and field grids differ");
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) total += std::abs(hist.density[k] - values[k]);
    return total * grid.cell_volume();
}

ResidualEntry check_pi_normalization(const ProcessParams& params, const std::vector<Point>& probes,
                                     MeasureKind kind, double tolerance) {
    const double h = params.h(), r = params.walk_radius(), s = params.s();
    std::vector<double> values;
    for (const Point& x : probes) {
        const int n = x.dim();
        Point e(n);
        e[0] = 1.0;
        auto f = [&](double rho) {
            return unit_sphere_area(n) * std::pow(rho, n - 1) * step_measure_density(params, n, x, x + e * rho, kind);
        };
        const double edge = 2.0 * std::max(h, r);
        const quad::Options opt{1e-13, 0.0, 1000};
        values.push_back(quad::integrate(f, 0.0, edge, std::vector<double>{h, r}, opt) + quad::integrate_tail(f, edge, edge, s, opt));
    }
    const char* name = kind == MeasureKind::Walk ? "pi_walk_normalization"
                       : kind == MeasureKind::Jump ? "pi_jump_normalization"
                                                   : "pi_normalization";
    return make_entry(name, worst_deviation(values, 1.0), 1.0, tolerance, "radial quadrature with mapped tail");
}

namespace {

std::vector<Point> normalization_points(const Domain& domain, double r) {
    std::vector<Point> pts;
    Point lo, hi;
    domain.bounding_box(lo, hi);
    if (domain.dim() == 1) {
        const double a = lo[0], b = hi[0], w = b - a;
        for (double x : {a + 0.5 * r, a + 1.5 * r, a + 0.3 * w, a + 0.5 * w, b - 0.5 * r})
            if (domain.contains(Point{x})) pts.push_back(Point{x});
        return pts;
    }
    const Point c = domain.center();
    pts.push_back(c);
    if (std::holds_alternative<Rectangle>(domain.shape())) {
        pts.push_back(Point{c[0], lo[1] + 0.5 * r});
        pts.push_back(Point{lo[0] + 0.5 * r, lo[1] + 0.5 * r});
    } else {
        const double R = 0.5 * (hi[0] - lo[0]);
        pts.push_back(Point{c[0] + R - 0.5 * r, c[1]});
    }
    return pts;
}

}  // namespace

ResidualReport run_validation_suite(const ValidationSuiteConfig& config) {
    ResidualReport report;
    const Domain& domain = config.domain;
    const int n = domain.dim();
    const auto points = normalization_points(domain, config.params.walk_radius());
    report.add(check_walk_normalization(config.params, domain, points));
    report.add(check_jump_normalization(config.params, domain, points));

    std::vector<Point> probes = points;
    probes.push_back(n == 1 ? Point{-3.0} : Point{-3.0, 7.0});
    report.add(check_pi_normalization(config.params, probes, MeasureKind::Walk, 1e-10));
    report.add(check_pi_normalization(config.params, probes, MeasureKind::Jump, 1e-8));
    report.add(check_pi_normalization(config.params, probes, MeasureKind::Combined, 1e-8));

    for (int k = 1; k <= 3; ++k) report.add(check_c_o(k));

    if (n == 1) {
        const auto mc = compute_c_star_monte_carlo(1, config.c_star_samples, config.seed);
        report.add(make_entry("c_star_n1_monte_carlo", mc.c_star, compute_c_star(1).c_star,
                              3.0 * mc.c_star_stderr, "monte carlo vs closed form (3 sigma)", config.seed));
    } else {
        const auto mc = compute_c_star(n, config.c_star_samples, config.seed);
        report.add(make_entry("c_star_n" + std::to_string(n), mc.c_star, c_star_quadrature(n),
                              3.0 * mc.c_star_stderr, "monte carlo vs slice quadrature (3 sigma)", config.seed));
        for (int k = 0; k < n - 1; ++k)
            report.add(make_entry("c_star_tangential_" + std::to_string(k), mc.tangential[k], 0.0,
                                  3.0 * mc.tangential_stderr[k], "monte carlo (3 sigma)", config.seed));
    }

    const bool lattice_domain = std::holds_alternative<Interval>(domain.shape()) ||
                                std::holds_alternative<Rectangle>(domain.shape());
    if (lattice_domain) {
        const auto coeff = EffectiveCoefficients::from_process(config.params, n);
        PdeSolver coarse(domain, config.params.s(), coeff, config.grid);
        GridSpec fine_grid = config.grid;
        fine_grid.dx *= 0.5;
        PdeSolver fine(domain, config.params.s(), coeff, fine_grid);
        const auto a = coarse.solve(coarse.initial_field(config.initial), config.final_time, {});
        const auto b = fine.solve(fine.initial_field(config.initial), config.final_time, {});
        report.add(check_neumann_local_refinement(a.back().field, b.back().field));

        report.add(check_neumann_nonlocal(a.back().field, config.params.s(), band_probes(coarse.lattice(), 20)));
        report.add(make_entry("mass_conservation", a.back().mass, a.front().field.mass() > 0 ? 1.0 : 0.0, 1e-8,
                              "discrete mass after solve"));
    }
    return report;
}

}  // namespace niche
