#include <doctest.h>

#include <cmath>
#include <vector>

#include "niche/quadrature.hpp"

namespace quad = niche::quad;

TEST_CASE("smooth and endpoint-singular integrands") {
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("breakpoints resolve jumps exactly") {
    auto step = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
    const std::vector<double> br{0.3};
    CHECK(quad::integrate(step, 0.0, 1.0, br) == doctest::Approx(0.3 + 3.5).epsilon(1e-14));
}

TEST_CASE("power tails integrate without truncation") {
    for (double q : {0.5, 1.0, 1.5}) {
        auto f = [q](double x) { return std::pow(x, -1.0 - q); };
        // ∫_2^∞ x^(-1-q) dx = 2^(-q) / q
        CHECK(quad::integrate_tail(f, 2.0, 1.0, q) ==
              doctest::Approx(std::pow(2.0, -q) / q).epsilon(1e-10));
    }
    auto g = [](double x) { return 1.0 / (1.0 + x * x); };
    CHECK(quad::integrate_tail(g, 0.0, 1.0, 1.0) == doctest::Approx(M_PI / 2).epsilon(1e-10));
}
