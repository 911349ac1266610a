#include "niche/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "niche/error.hpp"
#include "niche/quadrature.hpp"

namespace niche {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxReentryProposals = 10000;

void require_dim(const Point& x, int n, const char* what) {
    if (x.dim() != n)
        throw PreconditionError(std::string(what) + ": point dimension does not match domain");
}

// Endpoints of a one-dimensional domain (possibly infinite for a halfspace).
void bounds_1d(const Domain& domain, double& a, double& b) {
    if (const auto* I = std::get_if<Interval>(&domain.shape())) {
        a = I->a;
        b = I->b;
        return;
    }
    if (const auto* H = std::get_if<Halfspace>(&domain.shape()); H && H->normal.dim() == 1) {
        if (H->normal[0] > 0.0) {
            a = -kInf;
            b = 0.0;
        } else {
            a = 0.0;
            b = kInf;
        }
        return;
    }
    throw PreconditionError("expected a one-dimensional domain");
}

// ∫_{d1}^{d2} t^(-1-2s) dt for 0 <= d1 <= d2 <= inf.
double radial_mass(double d1, double d2, double s) {
    if (!(d2 > d1)) return 0.0;
    return (std::pow(d1, -2.0 * s) - std::pow(d2, -2.0 * s)) / (2.0 * s);
}

double kernel_mass_1d(double a, double b, double z, double c, double s) {
    // Right of z: distances in (max(a - z, c, 0), b - z); left: (max(z - b, c, 0), z - a).
    const double right = radial_mass(std::max({a - z, c, 0.0}), b - z, s);
    const double left = radial_mass(std::max({z - b, c, 0.0}), z - a, s);
    return right + left;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

Point direction(double theta) { return Point{std::cos(theta), std::sin(theta)}; }

// Angles (seen from z) where the integrand of a ray-based integral over the
// domain can have kinks: corners, tangents, and crossings of the circle
// |y - z| = c with the boundary.
std::vector<double> angular_breaks(const Domain& domain, const Point& z, double c) {
    std::vector<double> out = domain.corner_angles(z);
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Rectangle>) {
                if (c <= 0.0) return;
                for (int axis = 0; axis < 2; ++axis) {
                    const int other = 1 - axis;
                    for (double edge : {shape.lo[axis], shape.hi[axis]}) {
                        const double e = edge - z[axis];
                        const double disc = c * c - e * e;
                        if (disc < 0.0) continue;
                        for (double sgn : {-1.0, 1.0}) {
                            const double t = z[other] + sgn * std::sqrt(disc);
                            if (t < shape.lo[other] || t > shape.hi[other]) continue;
                            Point v(2);
                            v[axis] = e;
                            v[other] = t - z[other];
                            out.push_back(wrap_angle(std::atan2(v[1], v[0])));
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, Disk>) {
                const Point v = shape.center - z;
                const double d = v.norm();
                if (d == 0.0) return;
                const double phi = std::atan2(v[1], v[0]);
                if (d > shape.radius) {
                    const double half = std::asin(shape.radius / d);
                    out.push_back(wrap_angle(phi - half));
                    out.push_back(wrap_angle(phi + half));
                }
                if (c > 0.0 && d < shape.radius + c && d > std::abs(shape.radius - c)) {
                    const double cosv =
                        std::clamp((d * d + c * c - shape.radius * shape.radius) / (2.0 * d * c), -1.0, 1.0);
                    const double half = std::acos(cosv);
                    out.push_back(wrap_angle(phi - half));
                    out.push_back(wrap_angle(phi + half));
                }
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                const double phi = std::atan2(shape.normal[1], shape.normal[0]);
                out.push_back(wrap_angle(phi + 0.5 * kPi));
                out.push_back(wrap_angle(phi - 0.5 * kPi));
                const double delta = z.dot(shape.normal);
                if (c > 0.0 && std::abs(delta) < c) {
                    const double half = std::acos(std::clamp(-delta / c, -1.0, 1.0));
                    out.push_back(wrap_angle(phi - half));
                    out.push_back(wrap_angle(phi + half));
                }
            }
        },
        domain.shape());
    return out;
}

// Angles where the ray from c0 is tangent to the circle |y - x| = r.
void push_tangent_angles(std::vector<double>& out, const Point& c0, const Point& x, double r) {
    const Point v = x - c0;
    const double d = v.norm();
    if (d <= r) return;
    const double phi = std::atan2(v[1], v[0]);
    const double half = std::asin(r / d);
    out.push_back(wrap_angle(phi - half));
    out.push_back(wrap_angle(phi + half));
}

// Positive ray parameters where c0 + t u crosses the circle |y - x| = r.
void push_circle_crossings(std::vector<double>& out, const Point& c0, const Point& u,
                           const Point& x, double r) {
    const Point v = c0 - x;
    const double b = u.dot(v);
    const double disc = b * b - (v.norm2() - r * r);
    if (disc <= 0.0) return;
    const double sq = std::sqrt(disc);
    for (double t : {-b - sq, -b + sq})
        if (t > 0.0) out.push_back(t);
}

double kernel_mass_2d(const Domain& domain, const Point& z, double c, double s) {
    auto ray = [&](double theta) {
        double t0, t1;
        if (!domain.ray_span(z, direction(theta), t0, t1)) return 0.0;
        return radial_mass(std::max(t0, c), t1, s);
    };
    const std::vector<double> breaks = angular_breaks(domain, z, c);
    return quad::integrate(ray, 0.0, 2.0 * kPi, breaks, {1e-12, 1e-300, 4000});
}

// ---- walk density -------------------------------------------------------

double walk_reflected_1d(double a, double b, double x, double y, double r) {
    double total = 0.0;
    const double zh = std::min(x, y) + r;
    if (zh > b) {
        // Exterior points right of b: A(z) = b - max(a, z - r).
        const double split = a + r;
        if (split > b) total += (std::min(zh, split) - b) / (b - a);
        const double z1 = std::max(b, split);
        if (zh > z1) total += std::log((b - z1 + r) / (b - zh + r));
    }
    const double zl = std::max(x, y) - r;
    if (zl < a) {
        // Exterior points left of a: A(z) = min(b, z + r) - a.
        const double split = b - r;
        if (split < a) total += (a - std::max(zl, split)) / (b - a);
        const double z2 = std::min(a, split);
        if (z2 > zl) total += std::log((z2 + r - a) / (zl + r - a));
    }
    return total / (2.0 * r);
}

double walk_reflected_2d(const Domain& domain, const Point& x, const Point& y, double r) {
    const Point m = 0.5 * (x + y);
    const Point v = 0.5 * (y - x);
    const double d2 = v.norm2();
    if (d2 >= r * r) return 0.0;
    if (!domain.contains(m) || domain.distance_to_boundary(m) >= std::sqrt(r * r - d2)) return 0.0;
    const double ball = kPi * r * r;
    auto ray = [&](double theta) {
        const Point u = direction(theta);
        const double uv = std::abs(u.dot(v));
        const double rho_max = std::sqrt(uv * uv + r * r - d2) - uv;
        double t0, t1;
        if (!domain.ray_span(m, u, t0, t1)) return 0.0;
        if (!(rho_max > t1)) return 0.0;
        auto f = [&](double rho) {
            const Point z = m + rho * u;
            const double area = ball_intersection_volume(domain, z, r);
            return area > 0.0 ? rho / (ball * area) : 0.0;
        };
        return quad::integrate(f, t1, rho_max, {}, {1e-11, 1e-300, 2000});
    };
    const std::vector<double> breaks = domain.corner_angles(m);
    return quad::integrate(ray, 0.0, 2.0 * kPi, breaks, {1e-10, 1e-300, 4000});
}

// ---- jump density -------------------------------------------------------

double jump_reflected_1d(const ProcessParams& params, double a, double b, double x, double y) {
    const double s = params.s(), h = params.h();
    const double scale = std::isfinite(b - a) ? b - a : 1.0;
    auto mu = [&](double z) { return 2.0 * s * std::pow(h, 2.0 * s) * kernel_mass_1d(a, b, z, h, s); };
    const quad::Options opt{1e-12, 1e-300, 2000};
    double total = 0.0;
    if (std::isfinite(b)) {
        auto f = [&](double z) {
            return std::pow(z - x, -1.0 - 2.0 * s) * std::pow(z - y, -1.0 - 2.0 * s) / mu(z);
        };
        const double lo = std::max(b, std::max(x, y) + h);
        const double kink = b + h;
        double tail_start = lo;
        if (kink > lo) {
            total += quad::integrate(f, lo, kink, {}, opt);
            tail_start = kink;
        }
        total += quad::integrate_tail(f, tail_start, scale, 2.0 * s, opt);
    }
    if (std::isfinite(a)) {
        auto f = [&](double w) {  // w = -z, so the left tail becomes [.., inf)
            const double z = -w;
            return std::pow(x - z, -1.0 - 2.0 * s) * std::pow(y - z, -1.0 - 2.0 * s) / mu(z);
        };
        const double lo = -std::min(a, std::min(x, y) - h);
        const double kink = -(a - h);
        double tail_start = lo;
        if (kink > lo) {
            total += quad::integrate(f, lo, kink, {}, opt);
            tail_start = kink;
        }
        total += quad::integrate_tail(f, tail_start, scale, 2.0 * s, opt);
    }
    const double k = 2.0 * s * std::pow(h, 2.0 * s);
    return k * k / 2.0 * total;
}

double jump_reflected_2d(const ProcessParams& params, const Domain& domain, const Point& x,
                         const Point& y) {
    if (!domain.bounded()) throw PreconditionError("jump_density: 2D halfspaces are not supported");
    const double s = params.s(), h = params.h();
    const double kcoef = 2.0 * s * std::pow(h, 2.0 * s);
    const Point c0 = domain.center();
    const double scale = domain.diameter();
    const Disk* disk = std::get_if<Disk>(&domain.shape());
    Point lo, hi;
    domain.bounding_box(lo, hi);

    std::vector<double> abreaks = domain.corner_angles(c0);
    push_tangent_angles(abreaks, c0, x, h);
    push_tangent_angles(abreaks, c0, y, h);

    const quad::Options inner{1e-10, 1e-300, 2000};
    auto ray = [&](double theta) {
        const Point u = direction(theta);
        double t0, t1;
        domain.ray_span(c0, u, t0, t1);
        auto f = [&](double rho) {
            const Point z = c0 + rho * u;
            const double dx = distance(z, x), dy = distance(z, y);
            if (dx <= h || dy <= h) return 0.0;
            const double mu = kcoef * kernel_mass_2d(domain, z, h, s);
            if (!(mu > 0.0)) return 0.0;
            return rho * std::pow(dx, -2.0 - 2.0 * s) * std::pow(dy, -2.0 - 2.0 * s) / mu;
        };
        std::vector<double> rb;
        push_circle_crossings(rb, c0, u, x, h);
        push_circle_crossings(rb, c0, u, y, h);
        if (disk) {
            rb.push_back(disk->radius + h);
        } else {
            // Distance h from the boundary, approximated by the offset box.
            double e0, e1;
            const Domain grown = Domain::rectangle(lo - Point{h, h}, hi + Point{h, h});
            if (grown.ray_span(c0, u, e0, e1)) rb.push_back(e1);
        }
        double last = t1;
        for (double b : rb) last = std::max(last, b);
        double total = quad::integrate(f, t1, last, rb, inner);
        total += quad::integrate_tail(f, last, scale, 2.0 * s, inner);
        return total;
    };
    const double integral = quad::integrate(ray, 0.0, 2.0 * kPi, abreaks, {1e-9, 1e-300, 2000});
    return kcoef * kcoef / unit_sphere_area(2) * integral;
}

double sample_truncated_power_law(double lo, double hi, double s, double u) {
    if (!std::isfinite(hi)) return lo * std::pow(1.0 - u, -1.0 / (2.0 * s));
    const double a = std::pow(lo, -2.0 * s), b = std::pow(hi, -2.0 * s);
    return std::pow(a - u * (a - b), -1.0 / (2.0 * s));
}

Point reentry_1d(const ProcessParams& params, double a, double b, double z, CounterRng& rng) {
    const double s = params.s(), h = params.h();
    const double u = rng.uniform_open();
    if (z >= b) {
        const double top = std::min(b, z - h);
        if (!(top > a)) throw NumericalError("jump re-entry: no admissible target");
        if (!std::isfinite(a)) return Point{z - (z - top) * std::pow(u, -1.0 / (2.0 * s))};
        // (z - y)^(-2s) is uniform between its values at y = a and y = top.
        const double eps = std::expm1(2.0 * s * std::log((z - a) / (z - top)));
        const double y = a + (z - a) * -std::expm1(-std::log1p(u * eps) / (2.0 * s));
        return Point{std::clamp(y, std::nextafter(a, kInf), std::min(top, std::nextafter(b, -kInf)))};
    }
    if (z <= a) {
        const double bottom = std::max(a, z + h);
        if (!(bottom < b)) throw NumericalError("jump re-entry: no admissible target");
        if (!std::isfinite(b)) return Point{z + (bottom - z) * std::pow(u, -1.0 / (2.0 * s))};
        const double eps = std::expm1(2.0 * s * std::log((b - z) / (bottom - z)));
        const double y = b - (b - z) * -std::expm1(-std::log1p(u * eps) / (2.0 * s));
        return Point{std::clamp(y, std::max(bottom, std::nextafter(a, kInf)), std::nextafter(b, -kInf))};
    }
    throw PreconditionError("jump re-entry: exit point lies inside the domain");
}

// Rejection from a proposal on the visible cone of directions with a radial
// power law truncated to the distance range of the domain; the proposal has
// the target's polar density, so accepting points inside Ω is exact.
Point reentry_2d(const ProcessParams& params, const Domain& domain, const Point& z,
                 CounterRng& rng) {
    const double s = params.s(), h = params.h();
    double phi_lo, phi_hi, t_far;
    const double t_near = std::max(h, domain.distance_to_boundary(z));
    if (const auto* D = std::get_if<Disk>(&domain.shape())) {
        const Point v = D->center - z;
        const double d = v.norm();
        const double phi = std::atan2(v[1], v[0]);
        const double half = d > D->radius ? std::asin(D->radius / d) : 0.5 * kPi;
        phi_lo = phi - half;
        phi_hi = phi + half;
        t_far = d + D->radius;
    } else if (const auto* R = std::get_if<Rectangle>(&domain.shape())) {
        const Point v = domain.center() - z;
        const double phi = std::atan2(v[1], v[0]);
        double dmin = kInf, dmax = -kInf;
        t_far = 0.0;
        for (double cx : {R->lo[0], R->hi[0]})
            for (double cy : {R->lo[1], R->hi[1]}) {
                const Point w{cx - z[0], cy - z[1]};
                double d = std::atan2(w[1], w[0]) - phi;
                d = std::remainder(d, 2.0 * kPi);
                dmin = std::min(dmin, d);
                dmax = std::max(dmax, d);
                t_far = std::max(t_far, w.norm());
            }
        phi_lo = phi + dmin;
        phi_hi = phi + dmax;
    } else {
        const auto& H = std::get<Halfspace>(domain.shape());
        const double phi = std::atan2(H.normal[1], H.normal[0]);
        phi_lo = phi + 0.5 * kPi;
        phi_hi = phi + 1.5 * kPi;
        t_far = kInf;
    }
    if (!(t_far > t_near)) throw NumericalError("jump re-entry: no admissible target");
    for (int k = 0; k < kMaxReentryProposals; ++k) {
        const double theta = phi_lo + (phi_hi - phi_lo) * rng.uniform();
        const double t = sample_truncated_power_law(t_near, t_far, s, rng.uniform());
        const Point y = z + t * direction(theta);
        if (domain.contains(y)) return y;
    }
    throw NumericalError("jump re-entry: rejection cap exceeded");
}

}  // namespace

ProcessParams::ProcessParams(double s, double p, double h) : s_(s), p_(p), h_(h) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
    if (!(h > 0.0 && h < 1.0)) throw ConfigError("h must lie in (0, 1)");
}

bool ProcessParams::lambda_is_integer() const {
    const double l = lambda();
    return std::abs(l - std::round(l)) <= 1e-9 * std::max(1.0, l);
}

double second_moment_constant(int n) { return n * unit_ball_volume(n) / (n + 2.0); }

EffectiveCoefficients EffectiveCoefficients::from_process(const ProcessParams& params, int n) {
    EffectiveCoefficients c;
    c.c_o = second_moment_constant(n);
    c.alpha = (1.0 - params.p()) * c.c_o / (2.0 * n * unit_ball_volume(n));
    c.beta = 2.0 * params.s() * params.p() / unit_sphere_area(n);
    return c;
}

double kernel_mass(const Domain& domain, const Point& z, double cutoff, double s) {
    require_dim(z, domain.dim(), "kernel_mass");
    if (domain.dim() == 1) {
        double a, b;
        bounds_1d(domain, a, b);
        return kernel_mass_1d(a, b, z[0], cutoff, s);
    }
    if (domain.dim() == 2) return kernel_mass_2d(domain, z, cutoff, s);
    throw PreconditionError("kernel_mass: only dimensions 1 and 2 are supported");
}

double jump_reentry_weight(const ProcessParams& params, const Domain& domain, const Point& z) {
    return 2.0 * params.s() * std::pow(params.h(), 2.0 * params.s()) *
           kernel_mass(domain, z, params.h(), params.s());
}

double jump_reentry_density(const ProcessParams& params, const Domain& domain, const Point& z,
                            const Point& y) {
    require_dim(y, domain.dim(), "jump_reentry_density");
    const double d = distance(y, z);
    if (!domain.contains(y) || !(d > params.h())) return 0.0;
    const double mu = jump_reentry_weight(params, domain, z);
    if (!(mu > 0.0)) throw NumericalError("jump re-entry weight vanishes");
    const double s = params.s();
    return 2.0 * s * std::pow(params.h(), 2.0 * s) * std::pow(d, -domain.dim() - 2.0 * s) / mu;
}

double walk_density(const ProcessParams& params, const Domain& domain, const Point& x,
                    const Point& y) {
    require_dim(x, domain.dim(), "walk_density");
    require_dim(y, domain.dim(), "walk_density");
    if (!domain.contains(x) || !domain.contains(y))
        throw PreconditionError("walk_density: points must lie in the domain");
    const int n = domain.dim();
    const double r = params.walk_radius();
    const double direct = distance(x, y) < r ? 1.0 / (unit_ball_volume(n) * std::pow(r, n)) : 0.0;
    if (n == 1) {
        double a, b;
        bounds_1d(domain, a, b);
        return direct + walk_reflected_1d(a, b, x[0], y[0], r);
    }
    if (n == 2) return direct + walk_reflected_2d(domain, x, y, r);
    throw PreconditionError("walk_density: only dimensions 1 and 2 are supported");
}

double jump_density(const ProcessParams& params, const Domain& domain, const Point& x,
                    const Point& y) {
    require_dim(x, domain.dim(), "jump_density");
    require_dim(y, domain.dim(), "jump_density");
    if (!domain.contains(x) || !domain.contains(y))
        throw PreconditionError("jump_density: points must lie in the domain");
    const int n = domain.dim();
    const double direct = step_measure_density(params, n, x, y, MeasureKind::Jump);
    if (n == 1) {
        double a, b;
        bounds_1d(domain, a, b);
        return direct + jump_reflected_1d(params, a, b, x[0], y[0]);
    }
    if (n == 2) return direct + jump_reflected_2d(params, domain, x, y);
    throw PreconditionError("jump_density: only dimensions 1 and 2 are supported");
}

double combined_density(const ProcessParams& params, const Domain& domain, const Point& x,
                        const Point& y) {
    const double p = params.p();
    double total = 0.0;
    if (p > 0.0) total += p * jump_density(params, domain, x, y);
    if (p < 1.0) total += (1.0 - p) * walk_density(params, domain, x, y);
    return total;
}

double step_measure_density(const ProcessParams& params, int n, const Point& x, const Point& y,
                            MeasureKind kind) {
    if (x.dim() != n || y.dim() != n)
        throw PreconditionError("step_measure_density: dimension mismatch");
    const double d = distance(x, y);
    const double s = params.s(), h = params.h(), r = params.walk_radius();
    const double walk = d < r ? 1.0 / (unit_ball_volume(n) * std::pow(r, n)) : 0.0;
    const double jump =
        d > h ? 2.0 * s * std::pow(h, 2.0 * s) / (unit_sphere_area(n) * std::pow(d, n + 2.0 * s)) : 0.0;
    switch (kind) {
        case MeasureKind::Walk: return walk;
        case MeasureKind::Jump: return jump;
        case MeasureKind::Combined: return params.p() * jump + (1.0 - params.p()) * walk;
    }
    return 0.0;
}

double power_law_radius(double h, double s, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw PreconditionError("power_law_radius: u must lie in [0, 1)");
    return h * std::pow(1.0 - u, -1.0 / (2.0 * s));
}

double sample_power_law_radius(double h, double s, CounterRng& rng) {
    return power_law_radius(h, s, rng.uniform());
}

Point sample_direction(int n, CounterRng& rng) {
    if (n == 1) return Point{rng.uniform() < 0.5 ? -1.0 : 1.0};
    if (n == 2) return direction(2.0 * kPi * rng.uniform());
    Point v(n);
    double norm = 0.0;
    while (norm == 0.0) {
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        norm = v.norm();
    }
    return v * (1.0 / norm);
}

Point sample_walk_step(const ProcessParams& params, const Domain& domain, const Point& x,
                       CounterRng& rng) {
    const double r = params.walk_radius();
    const Point y = sample_uniform_in_ball(x, r, rng);
    if (domain.contains(y)) return y;
    return sample_uniform_in_intersection(domain, y, r, rng);
}

Point sample_jump_reentry(const ProcessParams& params, const Domain& domain, const Point& z,
                          CounterRng& rng) {
    require_dim(z, domain.dim(), "sample_jump_reentry");
    if (domain.dim() == 1) {
        double a, b;
        bounds_1d(domain, a, b);
        return reentry_1d(params, a, b, z[0], rng);
    }
    if (domain.dim() == 2) return reentry_2d(params, domain, z, rng);
    throw PreconditionError("sample_jump_reentry: only dimensions 1 and 2 are supported");
}

Point sample_jump_step(const ProcessParams& params, const Domain& domain, const Point& x,
                       CounterRng& rng) {
    const double rho = sample_power_law_radius(params.h(), params.s(), rng);
    const Point y = x + rho * sample_direction(domain.dim(), rng);
    if (domain.contains(y)) return y;
    return sample_jump_reentry(params, domain, y, rng);
}

}  // namespace niche
