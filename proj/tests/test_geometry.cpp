#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>
#include <algorithm>

#include "niche/error.hpp"
#include "niche/geometry.hpp"

using namespace niche;
using doctest::Approx;

namespace {

// Oracle: area of B_r(c) ∩ domain by integrating clipped chord lengths in x,
// split where the chord clipping changes form.
template <class Clip>
double chord_area(const Point& c, double r, Clip clip, std::vector<double> cuts = {}) {
    auto f = [&](double x) {
        const double w = std::sqrt(std::max(0.0, r * r - (x - c[0]) * (x - c[0])));
        return clip(x, c[1] - w, c[1] + w);
    };
    cuts.push_back(c[0] - r);
    cuts.push_back(c[0] + r);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(cuts[i], c[0] - r), hi = std::min(cuts[i + 1], c[0] + r);
        if (hi <= lo) continue;
        double err;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-12, &err);
    }
    return total;
}

// Abscissae where a circle crosses the lines y = y0 and y = y1.
std::vector<double> crossings(const Point& c, double r, std::vector<double> xs, double y0, double y1) {
    for (double y : {y0, y1}) {
        const double d = r * r - (y - c[1]) * (y - c[1]);
        if (d > 0) {
            xs.push_back(c[0] - std::sqrt(d));
            xs.push_back(c[0] + std::sqrt(d));
        }
    }
    return xs;
}

// Abscissae of the intersection points of the unit circle and |y - c| = r,
// plus the unit circle's extreme abscissae.
std::vector<double> circle_cuts(const Point& c, double r) {
    std::vector<double> xs{-1.0, 1.0};
    const double d = c.norm();
    if (d > 0 && d < 1 + r && d > std::abs(1 - r)) {
        const double a = (1 - r * r + d * d) / (2 * d);
        const double hh = std::sqrt(std::max(0.0, 1 - a * a));
        const Point u = c * (1.0 / d);
        xs.push_back(a * u[0] - hh * u[1]);
        xs.push_back(a * u[0] + hh * u[1]);
    }
    return xs;
}

}  // namespace

TEST_CASE("interval ball intersections") {
    const Domain I = Domain::interval(0.0, 1.0);
    CHECK(ball_intersection_volume(I, Point{1.05}, 0.1) == Approx(0.05).epsilon(1e-14));
    CHECK(ball_intersection_volume(I, Point{0.5}, 0.1) == Approx(0.2).epsilon(1e-14));
    CHECK(ball_intersection_volume(I, Point{1.5}, 0.1) == 0.0);
    CHECK(ball_intersection_volume(I, Point{0.5}, 3.0) == Approx(1.0));
}

TEST_CASE("rectangle and disk intersections against chord integration") {
    const Domain R = Domain::rectangle({0.0, 0.0}, {1.0, 1.0});
    CHECK(ball_intersection_volume(R, Point{0.5, 0.5}, 0.1) ==
          Approx(std::numbers::pi * 0.01).epsilon(1e-13));

    auto rect_clip = [](double x, double lo, double hi) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.0));
    };
    const Point centers[] = {{1.05, 0.5}, {0.02, 0.03}, {-0.05, 1.04}, {0.5, 0.5}, {1.2, 1.2}, {0.9, -0.2}};
    for (const Point& c : centers)
        for (double r : {0.1, 0.3, 0.7, 2.0}) {
            const double ref = chord_area(c, r, rect_clip, crossings(c, r, {0.0, 1.0}, 0.0, 1.0));
            CHECK(ball_intersection_volume(R, c, r) == Approx(ref).epsilon(1e-10).scale(1.0));
        }

    const Domain D = Domain::disk({0.0, 0.0}, 1.0);
    auto disk_clip = [](double x, double lo, double hi) {
        const double w = std::sqrt(std::max(0.0, 1.0 - x * x));
        return std::max(0.0, std::min(hi, w) - std::max(lo, -w));
    };
    for (const Point& c : {Point{0.95, 0.1}, Point{1.05, 0.0}, Point{0.0, 0.0}, Point{-0.6, 0.7}})
        for (double r : {0.1, 0.5, 1.5, 3.0})
            CHECK(ball_intersection_volume(D, c, r) ==
                  Approx(chord_area(c, r, disk_clip, circle_cuts(c, r))).epsilon(1e-10).scale(1.0));
}

TEST_CASE("halfspace caps") {
    // Spherical cap of height hc in a radius-r ball: pi hc^2 (3r - hc) / 3.
    const Domain H3 = Domain::halfspace({0.0, 0.0, 1.0});
    const double r = 0.8;
    for (double zc : {-0.5, 0.0, 0.3, 0.79}) {
        const double hc = r - zc;
        const double ref = std::numbers::pi * hc * hc * (3.0 * r - hc) / 3.0;
        CHECK(ball_intersection_volume(H3, Point{0.1, 0.2, zc}, r) == Approx(ref).epsilon(1e-10));
    }
    const Domain H2 = Domain::halfspace({0.0, 1.0});
    CHECK(ball_intersection_volume(H2, Point{3.0, 0.0}, 1.0) == Approx(std::numbers::pi / 2));
    const Domain H1 = Domain::halfspace(Point{1.0});
    CHECK(ball_intersection_volume(H1, Point{-0.25}, 1.0) == Approx(1.25));
}

TEST_CASE("contains is open and normals are outward") {
    const Domain I = Domain::interval(0.0, 1.0);
    CHECK_FALSE(I.contains(Point{0.0}));
    CHECK_FALSE(I.contains(Point{1.0}));
    CHECK(I.contains(Point{0.5}));
    CHECK(I.outward_normal(Point{1.0})[0] == 1.0);
    CHECK(I.outward_normal(Point{0.0})[0] == -1.0);
    CHECK_THROWS_AS(I.outward_normal(Point{0.5}), PreconditionError);
    CHECK_THROWS_AS(I.contains(Point{0.5, 0.5}), PreconditionError);

    const Domain R = Domain::rectangle({0.0, 0.0}, {2.0, 1.0});
    CHECK_FALSE(R.contains(Point{1.0, 1.0}));
    CHECK(R.outward_normal(Point{2.0, 0.5}) == Point{1.0, 0.0});
    CHECK(R.outward_normal(Point{1.0, 0.0}) == Point{0.0, -1.0});

    const Domain D = Domain::disk({1.0, 1.0}, 2.0);
    const Point n = D.outward_normal(Point{1.0 + std::sqrt(2.0), 1.0 + std::sqrt(2.0)});
    CHECK(n[0] == Approx(std::sqrt(0.5)));
    CHECK(n[1] == Approx(std::sqrt(0.5)));

    const Domain H = Domain::halfspace({0.6, 0.8});
    CHECK(H.outward_normal(Point{5.0, 5.0}) == Point{0.6, 0.8});
    CHECK_THROWS_AS(Domain::halfspace({1.0, 1.0}), ConfigError);
}

TEST_CASE("ray spans") {
    const Domain R = Domain::rectangle({0.0, 0.0}, {1.0, 1.0});
    double t0, t1;
    REQUIRE(R.ray_span(Point{0.5, 0.5}, Point{1.0, 0.0}, t0, t1));
    CHECK(t0 == 0.0);
    CHECK(t1 == Approx(0.5));
    REQUIRE(R.ray_span(Point{-1.0, 0.5}, Point{1.0, 0.0}, t0, t1));
    CHECK(t0 == Approx(1.0));
    CHECK(t1 == Approx(2.0));
    CHECK_FALSE(R.ray_span(Point{-1.0, 0.5}, Point{-1.0, 0.0}, t0, t1));

    const Domain D = Domain::disk({0.0, 0.0}, 1.0);
    REQUIRE(D.ray_span(Point{-2.0, 0.0}, Point{1.0, 0.0}, t0, t1));
    CHECK(t0 == Approx(1.0));
    CHECK(t1 == Approx(3.0));
}

TEST_CASE("uniform sampling in an intersection") {
    const Domain I = Domain::interval(0.0, 1.0);
    CounterRng rng(11, 0);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Point y = sample_uniform_in_intersection(I, Point{1.05}, 0.1, rng);
        REQUIRE(y[0] > 0.95);
        REQUIRE(y[0] < 1.0);
        sum += y[0];
    }
    const double sigma = 0.05 / std::sqrt(12.0 * n);
    CHECK(std::abs(sum / n - 0.975) < 4.0 * sigma);

    // 2D: the sample mean matches the centroid of the lens, computed by
    // chord integration.
    const Domain D = Domain::disk({0.0, 0.0}, 1.0);
    const Point c{1.05, 0.3};
    const double r = 0.4;
    auto disk_clip = [](double x, double lo, double hi) {
        const double w = std::sqrt(std::max(0.0, 1.0 - x * x));
        return std::max(0.0, std::min(hi, w) - std::max(lo, -w));
    };
    auto disk_clip_x = [&](double x, double lo, double hi) { return x * disk_clip(x, lo, hi); };
    const double area = chord_area(c, r, disk_clip);
    const double mx = chord_area(c, r, disk_clip_x) / area;
    double sx = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        const Point y = sample_uniform_in_intersection(D, c, r, rng);
        REQUIRE(D.contains(y));
        REQUIRE(distance(y, c) < r);
        sx += y[0];
        sxx += y[0] * y[0];
    }
    const double var = sxx / n - (sx / n) * (sx / n);
    CHECK(std::abs(sx / n - mx) < 4.0 * std::sqrt(var / n));
}

TEST_CASE("sampling from an empty intersection fails loudly") {
    CounterRng rng(1, 1);
    CHECK_THROWS_AS(sample_uniform_in_intersection(Domain::interval(0.0, 1.0), Point{3.0}, 0.5, rng),
                    NumericalError);
    CHECK_THROWS_AS(
        sample_uniform_in_intersection(Domain::disk({0.0, 0.0}, 1.0), Point{3.0, 0.0}, 0.5, rng),
        NumericalError);
}
