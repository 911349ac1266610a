#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "niche/error.hpp"
#include "niche/phantom.hpp"

using namespace niche;
using doctest::Approx;

namespace {

PhantomConfig base_config() {
    PhantomConfig cfg;
    cfg.params = ProcessParams(0.5, 0.5, 1e-3);
    cfg.domain = Domain::interval(0.0, 1.0);
    cfg.grid = {1.0 / 256.0, 2.0};
    cfg.final_time = 0.01;
    cfg.initial = InitialCondition::uniform();
    return cfg;
}

}  // namespace

TEST_CASE("constants are preserved") {
    PhantomConfig cfg = base_config();
    PhantomProcess proc(cfg);
    GridField f = proc.initial_field();
    for (int k = 0; k < 5; ++k) proc.step(f);
    for (double v : f.values()) CHECK(v == Approx(1.0).epsilon(1e-10));

    PhantomConfig cfg2 = base_config();
    cfg2.params = ProcessParams(0.5, 0.3, 0.01);
    cfg2.domain = Domain::rectangle({0.0, 0.0}, {1.0, 1.0});
    cfg2.grid = {1.0 / 32.0, 0.5};
    PhantomProcess proc2(cfg2);
    GridField g = proc2.initial_field();
    proc2.step(g);
    for (int node : proc2.lattice().interior_nodes()) CHECK(g.values()[node] == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("one step from a point mass follows the free-space step measure") {
    PhantomConfig cfg = base_config();
    const double dx = cfg.grid.dx;
    const Point x0{0.5 + 0.5 * dx};  // a node centre, so the deposit hits one cell
    cfg.initial = InitialCondition::point_mass(x0);
    PhantomProcess proc(cfg);
    // Single source cell with an empty exterior, so only that cell feeds the core.
    GridField f = proc.initial_field();
    for (int node : proc.lattice().exterior_nodes()) f.values()[node] = 0.0;
    f.far_value() = 0.0;
    proc.step(f);
    const Lattice& L = proc.lattice();
    const double r = cfg.params.walk_radius(), h = cfg.params.h(), p = cfg.params.p();
    // Cell averages of the step measure for s = 1/2 in 1D: the walk part is
    // uniform on (x0 - r, x0 + r) and the jump density is (h / 2) |y - x0|^(-2)
    // beyond h.
    int checked = 0;
    for (int node : L.interior_nodes()) {
        if (!proc.in_core(node) || node == L.locate(x0)) continue;
        const double c = L.position(node)[0] - x0[0];
        const double a = std::abs(c) - 0.5 * dx, b = std::abs(c) + 0.5 * dx;
        const double walk = std::max(0.0, std::min(b, r) - std::max(a, 0.0)) / (2.0 * r);
        const double lo = std::max(a, h);
        const double jump = b > lo ? 0.5 * h * (1.0 / lo - 1.0 / b) : 0.0;
        CHECK(f.values()[node] == Approx((p * jump + (1.0 - p) * walk) / dx).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("collar values are ball averages after a step") {
    PhantomConfig cfg = base_config();
    cfg.initial = InitialCondition::point_mass(Point{0.1});
    PhantomProcess proc(cfg);
    GridField f = proc.initial_field();
    proc.step(f);
    proc.step(f);
    const Lattice& L = proc.lattice();
    const double r = cfg.params.walk_radius();
    int checked = 0;
    for (int node : L.interior_nodes()) {
        if (proc.in_core(node)) continue;
        const double x = L.position(node)[0];
        // Average of the cell values over (0, 1) ∩ (x - r, x + r), weighting
        // cells by their overlap.
        double num = 0.0, den = 0.0;
        for (int j : L.interior_nodes()) {
            const double c = L.position(j)[0];
            const double w = std::max(0.0, std::min(c + 0.5 * L.dx(), x + r) - std::max(c - 0.5 * L.dx(), x - r));
            num += w * f.values()[j];
            den += w;
        }
        CHECK(f.values()[node] == Approx(num / den).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("mass is kept for smooth data and nearly kept from a point mass") {
    PhantomConfig cfg = base_config();
    cfg.initial = InitialCondition::function([](const Point& x) { return 1.0 + std::cos(3.14159265358979 * x[0]); }, 2.0);
    PhantomProcess proc(cfg);
    GridField f = proc.initial_field();
    for (int k = 0; k < 50; ++k) proc.step(f);
    CHECK(f.mass() == Approx(1.0).epsilon(1e-5));

    cfg.initial = InitialCondition::point_mass(Point{0.5});
    cfg.final_time = 0.05;
    cfg.snapshot_times = {0.02};
    auto snaps = run_phantom_process(cfg);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].step == 20);
    CHECK(snaps[1].step == 50);
    for (const auto& s : snaps) CHECK(s.mass == Approx(1.0).epsilon(0.01));
    for (double v : snaps.back().field.interior_values()) CHECK(v >= 0.0);
}

TEST_CASE("grid preconditions") {
    PhantomConfig cfg = base_config();
    cfg.grid.dx = 1.0 / 32.0;  // walk radius 0.0316 < 2 dx
    CHECK_THROWS_AS(PhantomProcess{cfg}, PreconditionError);
    cfg = base_config();
    cfg.params = ProcessParams(0.5, 0.5, 0.09);  // walk radius 0.3, band 0.25
    cfg.grid = {1.0 / 64.0, 0.25};
    CHECK_THROWS_AS(PhantomProcess{cfg}, PreconditionError);
    cfg = base_config();
    cfg.domain = Domain::disk({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(PhantomProcess{cfg}, PreconditionError);
}
