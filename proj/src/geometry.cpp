#include "niche/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "niche/error.hpp"
#include "niche/quadrature.hpp"

namespace niche {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr int kMaxRejections = 10000;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_dim(const Point& x, int n, const char* what) {
    if (x.dim() != n)
        throw PreconditionError(std::string(what) + ": point dimension does not match domain");
}

// Antiderivative of 2 sqrt(r^2 - x^2) on [-r, r], shifted so S(-r) = 0.
double chord_integral(double x, double r) {
    const double t = std::clamp(x, -r, r);
    return t * std::sqrt(std::max(0.0, r * r - t * t)) + r * r * std::asin(t / r) +
           0.5 * std::numbers::pi * r * r;
}

// Area of {|y| < r} ∩ {y1 < a, y2 < b}.
double disk_quadrant_area(double a, double b, double r) {
    const double c = std::sqrt(std::max(0.0, r * r - b * b));
    const double A = std::clamp(a, -r, r);
    auto w_int = [&](double lo, double hi) {  // ∫ sqrt(r^2 - x^2) over [lo, hi]
        return 0.5 * (chord_integral(hi, r) - chord_integral(lo, r));
    };
    double area = 0.0;
    // |x| > c: the chord lies entirely below b (b >= 0) or entirely above it.
    if (b >= 0.0) {
        area += 2.0 * w_int(-r, std::min(A, -c));
        if (A > c) area += 2.0 * w_int(c, A);
    }
    // |x| <= c: the chord is cut at height b.
    const double hi = std::min(A, c);
    if (hi > -c) area += b * (hi + c) + w_int(-c, hi);
    return area;
}

double rect_disk_area(const Rectangle& R, const Point& c, double r) {
    const double x0 = R.lo[0] - c[0], x1 = R.hi[0] - c[0];
    const double y0 = R.lo[1] - c[1], y1 = R.hi[1] - c[1];
    const double v = disk_quadrant_area(x1, y1, r) - disk_quadrant_area(x0, y1, r) -
                     disk_quadrant_area(x1, y0, r) + disk_quadrant_area(x0, y0, r);
    return std::clamp(v, 0.0, std::numbers::pi * r * r);
}

double lens_area(double d, double r1, double r2) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double m = std::min(r1, r2);
        return std::numbers::pi * m * m;
    }
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
}

// Volume of B_r(c) ∩ {x . nu < 0}, nu a unit vector.
double ball_halfspace_volume(const Point& nu, const Point& c, double r) {
    const int n = nu.dim();
    const double delta = c.dot(nu);  // signed distance of the centre, positive outside
    const double top = std::min(r, -delta);
    if (top <= -r) return 0.0;
    if (n == 1) return top + r;
    if (n == 2) return chord_integral(top, r);
    const double slice = unit_ball_volume(n - 1);
    auto f = [&](double t) { return slice * std::pow(std::max(0.0, r * r - t * t), 0.5 * (n - 1)); };
    return quad::integrate(f, -r, top, {}, {1e-12, 0.0, 4000});
}

}  // namespace

double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

Domain::Domain(Shape shape) : shape_(std::move(shape)) {
    dim_ = std::visit(
        overloaded{[](const Interval& I) {
                       if (!(I.b > I.a)) throw ConfigError("Interval: need a < b");
                       return 1;
                   },
                   [](const Rectangle& R) {
                       if (R.lo.dim() != 2 || R.hi.dim() != 2)
                           throw ConfigError("Rectangle: corners must be 2D points");
                       if (!(R.hi[0] > R.lo[0] && R.hi[1] > R.lo[1]))
                           throw ConfigError("Rectangle: need lo < hi componentwise");
                       return 2;
                   },
                   [](const Disk& D) {
                       if (D.center.dim() != 2) throw ConfigError("Disk: centre must be a 2D point");
                       if (!(D.radius > 0.0)) throw ConfigError("Disk: radius must be positive");
                       return 2;
                   },
                   [](const Halfspace& H) {
                       if (H.normal.dim() < 1) throw ConfigError("Halfspace: empty normal");
                       if (std::abs(H.normal.norm() - 1.0) > 1e-12)
                           throw ConfigError("Halfspace: normal must be a unit vector");
                       return H.normal.dim();
                   }},
        shape_);
}

std::string Domain::name() const {
    return std::visit(overloaded{[](const Interval&) { return std::string("interval"); },
                                 [](const Rectangle&) { return std::string("rectangle"); },
                                 [](const Disk&) { return std::string("disk"); },
                                 [](const Halfspace&) { return std::string("halfspace"); }},
                      shape_);
}

double Domain::volume() const {
    return std::visit(
        overloaded{[](const Interval& I) { return I.b - I.a; },
                   [](const Rectangle& R) { return (R.hi[0] - R.lo[0]) * (R.hi[1] - R.lo[1]); },
                   [](const Disk& D) { return std::numbers::pi * D.radius * D.radius; },
                   [](const Halfspace&) -> double {
                       throw PreconditionError("Halfspace has infinite volume");
                   }},
        shape_);
}

double Domain::diameter() const {
    return std::visit(overloaded{[](const Interval& I) { return I.b - I.a; },
                                 [](const Rectangle& R) { return distance(R.lo, R.hi); },
                                 [](const Disk& D) { return 2.0 * D.radius; },
                                 [](const Halfspace&) -> double {
                                     throw PreconditionError("Halfspace has infinite diameter");
                                 }},
                      shape_);
}

Point Domain::center() const {
    return std::visit(overloaded{[](const Interval& I) { return Point{0.5 * (I.a + I.b)}; },
                                 [](const Rectangle& R) { return 0.5 * (R.lo + R.hi); },
                                 [](const Disk& D) { return D.center; },
                                 [](const Halfspace& H) { return Point::zeros(H.normal.dim()); }},
                      shape_);
}

void Domain::bounding_box(Point& lo, Point& hi) const {
    std::visit(overloaded{[&](const Interval& I) {
                              lo = Point{I.a};
                              hi = Point{I.b};
                          },
                          [&](const Rectangle& R) {
                              lo = R.lo;
                              hi = R.hi;
                          },
                          [&](const Disk& D) {
                              lo = D.center - Point{D.radius, D.radius};
                              hi = D.center + Point{D.radius, D.radius};
                          },
                          [](const Halfspace&) {
                              throw PreconditionError("Halfspace has no bounding box");
                          }},
               shape_);
}

bool Domain::contains(const Point& x) const {
    require_dim(x, dim_, "contains");
    return std::visit(
        overloaded{[&](const Interval& I) { return x[0] > I.a && x[0] < I.b; },
                   [&](const Rectangle& R) {
                       return x[0] > R.lo[0] && x[0] < R.hi[0] && x[1] > R.lo[1] && x[1] < R.hi[1];
                   },
                   [&](const Disk& D) { return (x - D.center).norm2() < D.radius * D.radius; },
                   [&](const Halfspace& H) { return x.dot(H.normal) < 0.0; }},
        shape_);
}

double Domain::distance_to_boundary(const Point& x) const {
    require_dim(x, dim_, "distance_to_boundary");
    return std::visit(
        overloaded{[&](const Interval& I) { return std::min(std::abs(x[0] - I.a), std::abs(x[0] - I.b)); },
                   [&](const Rectangle& R) {
                       if (contains(x))
                           return std::min({x[0] - R.lo[0], R.hi[0] - x[0], x[1] - R.lo[1],
                                            R.hi[1] - x[1]});
                       double d2 = 0.0;
                       for (int k = 0; k < 2; ++k) {
                           const double e = std::max({R.lo[k] - x[k], 0.0, x[k] - R.hi[k]});
                           d2 += e * e;
                       }
                       return std::sqrt(d2);
                   },
                   [&](const Disk& D) { return std::abs((x - D.center).norm() - D.radius); },
                   [&](const Halfspace& H) { return std::abs(x.dot(H.normal)); }},
        shape_);
}

Point Domain::outward_normal(const Point& x) const {
    require_dim(x, dim_, "outward_normal");
    return std::visit(
        overloaded{
            [&](const Interval& I) {
                if (std::abs(x[0] - I.a) <= kBoundaryTol) return Point{-1.0};
                if (std::abs(x[0] - I.b) <= kBoundaryTol) return Point{1.0};
                throw PreconditionError("outward_normal: point is not on the boundary");
            },
            [&](const Rectangle& R) {
                const double d[4] = {std::abs(x[0] - R.lo[0]), std::abs(x[0] - R.hi[0]),
                                     std::abs(x[1] - R.lo[1]), std::abs(x[1] - R.hi[1])};
                const bool in_x = x[0] >= R.lo[0] - kBoundaryTol && x[0] <= R.hi[0] + kBoundaryTol;
                const bool in_y = x[1] >= R.lo[1] - kBoundaryTol && x[1] <= R.hi[1] + kBoundaryTol;
                const Point normals[4] = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}};
                int best = -1;
                for (int k = 0; k < 4; ++k) {
                    const bool along = k < 2 ? in_y : in_x;
                    if (d[k] <= kBoundaryTol && along && (best < 0 || d[k] < d[best])) best = k;
                }
                if (best < 0) throw PreconditionError("outward_normal: point is not on the boundary");
                return normals[best];
            },
            [&](const Disk& D) {
                const Point v = x - D.center;
                const double r = v.norm();
                if (std::abs(r - D.radius) > kBoundaryTol)
                    throw PreconditionError("outward_normal: point is not on the boundary");
                return v * (1.0 / r);
            },
            [&](const Halfspace& H) { return H.normal; }},
        shape_);
}

bool Domain::ray_span(const Point& x, const Point& u, double& t0, double& t1) const {
    require_dim(x, dim_, "ray_span");
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    auto slab = [&](double xk, double uk, double a, double b) {
        if (uk == 0.0) {
            if (xk <= a || xk >= b) hi = -1.0;
            return;
        }
        double ta = (a - xk) / uk, tb = (b - xk) / uk;
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
    };
    std::visit(overloaded{[&](const Interval& I) { slab(x[0], u[0], I.a, I.b); },
                          [&](const Rectangle& R) {
                              slab(x[0], u[0], R.lo[0], R.hi[0]);
                              slab(x[1], u[1], R.lo[1], R.hi[1]);
                          },
                          [&](const Disk& D) {
                              const Point v = x - D.center;
                              const double b = v.dot(u);
                              const double c = v.norm2() - D.radius * D.radius;
                              const double disc = b * b - c;
                              if (disc <= 0.0) {
                                  hi = -1.0;
                                  return;
                              }
                              const double sq = std::sqrt(disc);
                              lo = std::max(lo, -b - sq);
                              hi = std::min(hi, -b + sq);
                          },
                          [&](const Halfspace& H) {
                              const double a = x.dot(H.normal), du = u.dot(H.normal);
                              if (du == 0.0) {
                                  if (a >= 0.0) hi = -1.0;
                              } else if (du > 0.0) {
                                  hi = std::min(hi, -a / du);
                              } else {
                                  lo = std::max(lo, -a / du);
                              }
                          }},
               shape_);
    if (!(hi > lo)) return false;
    t0 = lo;
    t1 = hi;
    return true;
}

std::vector<double> Domain::corner_angles(const Point& x) const {
    std::vector<double> out;
    if (const auto* R = std::get_if<Rectangle>(&shape_)) {
        const double xs[2] = {R->lo[0], R->hi[0]}, ys[2] = {R->lo[1], R->hi[1]};
        for (double cx : xs)
            for (double cy : ys) {
                double a = std::atan2(cy - x[1], cx - x[0]);
                if (a < 0.0) a += 2.0 * std::numbers::pi;
                out.push_back(a);
            }
    }
    return out;
}

double ball_intersection_volume(const Domain& domain, const Point& c, double r) {
    require_dim(c, domain.dim(), "ball_intersection_volume");
    if (!(r > 0.0)) return 0.0;
    return std::visit(
        overloaded{[&](const Interval& I) {
                       return std::max(0.0, std::min(I.b, c[0] + r) - std::max(I.a, c[0] - r));
                   },
                   [&](const Rectangle& R) { return rect_disk_area(R, c, r); },
                   [&](const Disk& D) { return lens_area(distance(c, D.center), D.radius, r); },
                   [&](const Halfspace& H) { return ball_halfspace_volume(H.normal, c, r); }},
        domain.shape());
}

Point sample_uniform_in_ball(const Point& c, double r, CounterRng& rng) {
    const int n = c.dim();
    if (n == 1) return Point{c[0] + r * (2.0 * rng.uniform() - 1.0)};
    if (n == 2) {
        const double rho = r * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        return Point{c[0] + rho * std::cos(phi), c[1] + rho * std::sin(phi)};
    }
    Point dir(n);
    double norm = 0.0;
    while (norm == 0.0) {
        for (int i = 0; i < n; ++i) dir[i] = rng.normal();
        norm = dir.norm();
    }
    const double rho = r * std::pow(rng.uniform(), 1.0 / n);
    return c + dir * (rho / norm);
}

Point sample_uniform_in_intersection(const Domain& domain, const Point& c, double r,
                                     CounterRng& rng) {
    require_dim(c, domain.dim(), "sample_uniform_in_intersection");
    if (const auto* I = std::get_if<Interval>(&domain.shape())) {
        const double lo = std::max(I->a, c[0] - r), hi = std::min(I->b, c[0] + r);
        if (!(hi > lo)) throw NumericalError("sample_uniform_in_intersection: empty intersection");
        for (int k = 0; k < kMaxRejections; ++k) {
            const double y = lo + (hi - lo) * rng.uniform_open();
            if (y > lo && y < hi) return Point{y};
        }
        throw NumericalError("sample_uniform_in_intersection: rejection cap exceeded");
    }
    if (!domain.bounded()) {
        for (int k = 0; k < kMaxRejections; ++k) {
            Point y = sample_uniform_in_ball(c, r, rng);
            if (domain.contains(y)) return y;
        }
        throw NumericalError("sample_uniform_in_intersection: rejection cap exceeded");
    }
    // Propose uniformly on the overlap of the two bounding boxes; this keeps
    // the acceptance rate reasonable when the intersection is a thin sliver.
    Point lo, hi;
    domain.bounding_box(lo, hi);
    for (int k = 0; k < c.dim(); ++k) {
        lo[k] = std::max(lo[k], c[k] - r);
        hi[k] = std::min(hi[k], c[k] + r);
        if (!(hi[k] > lo[k])) throw NumericalError("sample_uniform_in_intersection: empty intersection");
    }
    Point y(c.dim());
    for (int k = 0; k < kMaxRejections; ++k) {
        for (int i = 0; i < c.dim(); ++i) y[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
        if (domain.contains(y) && (y - c).norm2() < r * r) return y;
    }
    throw NumericalError("sample_uniform_in_intersection: rejection cap exceeded");
}

}  // namespace niche
