#pragma once

#include <string>
#include <variant>
#include <vector>

#include "niche/point.hpp"
#include "niche/rng.hpp"

namespace niche {

struct Interval {
    double a = 0.0, b = 1.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned rectangle in R^2.
struct Rectangle {
    Point lo{0.0, 0.0}, hi{1.0, 1.0};
    friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

struct Disk {
    Point center{0.0, 0.0};
    double radius = 1.0;
    friend bool operator==(const Disk&, const Disk&) = default;
};

/// {x : x . normal < 0} in R^n; `normal` is the unit outward normal.
struct Halfspace {
    Point normal{0.0, 1.0};
    friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// Convex domain in R^n. `contains` treats the domain as an open set.
class Domain {
public:
    using Shape = std::variant<Interval, Rectangle, Disk, Halfspace>;

    explicit Domain(Shape shape);

    static Domain interval(double a, double b) { return Domain(Interval{a, b}); }
    static Domain rectangle(Point lo, Point hi) { return Domain(Rectangle{lo, hi}); }
    static Domain disk(Point center, double radius) { return Domain(Disk{center, radius}); }
    static Domain halfspace(Point normal) { return Domain(Halfspace{normal}); }

    const Shape& shape() const { return shape_; }
    friend bool operator==(const Domain& a, const Domain& b) { return a.shape_ == b.shape_; }
    int dim() const { return dim_; }
    bool bounded() const { return !std::holds_alternative<Halfspace>(shape_); }
    std::string name() const;

    double volume() const;
    double diameter() const;
    Point center() const;
    /// Axis-aligned bounding box of a bounded domain.
    void bounding_box(Point& lo, Point& hi) const;

    bool contains(const Point& x) const;

    /// Unit outward normal at a point within 1e-9 of the boundary.
    Point outward_normal(const Point& x) const;

    /// Distance from x to the boundary (for x inside or outside).
    double distance_to_boundary(const Point& x) const;

    /// Parameter range (t0, t1) for which x + t u lies in the domain, t >= 0.
    /// Returns false if the ray misses the domain. u must be a unit vector.
    bool ray_span(const Point& x, const Point& u, double& t0, double& t1) const;

    /// Polar angles of the domain's corners seen from x (2D rectangles only;
    /// empty otherwise). Useful as quadrature breakpoints.
    std::vector<double> corner_angles(const Point& x) const;

private:
    Shape shape_;
    int dim_;
};

/// vol(domain ∩ B_r(c)), exact where a closed form exists.
double ball_intersection_volume(const Domain& domain, const Point& c, double r);

Point sample_uniform_in_ball(const Point& c, double r, CounterRng& rng);

/// Uniform sample from domain ∩ B_r(c). Throws NumericalError if rejection
/// sampling needs more than 10000 proposals.
Point sample_uniform_in_intersection(const Domain& domain, const Point& c, double r,
                                     CounterRng& rng);

}  // namespace niche
