#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "niche/error.hpp"
#include "niche/pde_solver.hpp"

using namespace niche;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double gk(F f, double a, double b) {
    double err;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12, &err);
}

// Fill every lattice node (interior and band) with f.
GridField sample(std::shared_ptr<const Lattice> lattice, double (*f)(double)) {
    GridField field(lattice);
    for (int node = 0; node < lattice->size(); ++node)
        field.values()[node] = f(lattice->position(node)[0]);
    return field;
}

double cos_pi(double x) { return std::cos(kPi * x); }

// ∫_{lo}^{hi} (cos πx - cos πy) |x - y|^(-1-2s) dy + cos(πx) * (far-field weight
// of [lo, hi] seen from x). This is what the discrete operator approximates when
// the band holds cos πy and the far value is 0.
double truncated_cos_reference(double x, double lo, double hi, double s) {
    auto f = [&](double y) {
        const double d = std::abs(x - y);
        return d == 0.0 ? 0.0 : (cos_pi(x) - cos_pi(y)) * std::pow(d, -1.0 - 2.0 * s);
    };
    double total = 0.0;
    for (double a = std::floor(lo); a < hi; a += 1.0) {
        double l = std::max(a, lo), r = std::min(a + 1.0, hi);
        if (l < x && x < r) {
            total += gk(f, l, x) + gk(f, x, r);
        } else {
            total += gk(f, l, r);
        }
    }
    const double far = (std::pow(x - lo, -2.0 * s) + std::pow(hi - x, -2.0 * s)) / (2.0 * s);
    return total + cos_pi(x) * far;
}

}  // namespace

TEST_CASE("exterior extension of u(y) = y matches the closed form") {
    // ∫_0^1 y (2 - y)^(-2) dy / ∫_0^1 (2 - y)^(-2) dy = 2 (1 - ln 2).
    auto lattice = std::make_shared<Lattice>(Domain::interval(0.0, 1.0), 1.0 / 1024.0, 1.0);
    GridField field(lattice);
    for (int node : lattice->interior_nodes()) field.values()[node] = lattice->position(node)[0];
    CHECK(extend_exterior(field, 0.5, Point{2.0}, 0.0) == Approx(2.0 * (1.0 - std::log(2.0))).epsilon(1e-6));
    CHECK(extend_exterior(field, 0.5, Point{1e6}, 0.0) == Approx(0.5).epsilon(0.01));
    CHECK(extend_exterior(field, 0.5, Point{-1e6}, 0.0) == Approx(0.5).epsilon(0.01));
    // Punching out B_h(x) only removes cells that the point can see.
    CHECK(extend_exterior_punched(field, 0.5, Point{2.0}, 0.5) == Approx(extend_exterior(field, 0.5, Point{2.0})));
    const double punched = extend_exterior_punched(field, 0.5, Point{1.2}, 0.5);
    // Oracle: same ratio over (0, 0.7).
    const double num = gk([](double y) { return y / ((1.2 - y) * (1.2 - y)); }, 0.0, 0.7);
    const double den = gk([](double y) { return 1.0 / ((1.2 - y) * (1.2 - y)); }, 0.0, 0.7);
    CHECK(punched == Approx(num / den).epsilon(1e-5));
}

TEST_CASE("constant fields are fixed points of the extension and the operator") {
    for (int n : {1, 2}) {
        const Domain d = n == 1 ? Domain::interval(0.0, 1.0) : Domain::rectangle({0.0, 0.0}, {1.0, 0.5});
        PdeSolver solver(d, 0.4, {0.1, 0.3, 0.0}, {n == 1 ? 1.0 / 64.0 : 1.0 / 16.0, 2.0});
        GridField f = solver.initial_field(InitialCondition::uniform());
        const double c = 1.0 / d.volume();
        for (double v : f.values()) CHECK(v == Approx(c).epsilon(1e-12));
        CHECK(f.far_value() == Approx(c).epsilon(1e-12));
        for (int node : solver.lattice().interior_nodes())
            CHECK(std::abs(fractional_laplacian(f, solver.op(), node)) < 1e-10);
        CHECK(neumann_nonlocal_residual(f, solver.op()) < 1e-10);
        auto snaps = solver.solve(f, 0.05, {});
        for (int node : solver.lattice().interior_nodes())
            CHECK(snaps.back().field.values()[node] == Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("classical Laplacian is exact on quadratics and affine functions") {
    auto lattice = std::make_shared<Lattice>(Domain::interval(0.0, 1.0), 1e-3, 0.0);
    GridField quad(lattice), affine(lattice);
    for (int node : lattice->interior_nodes()) {
        const double x = lattice->position(node)[0];
        quad.values()[node] = x * x;
        affine.values()[node] = 3.0 * x - 1.0;
    }
    for (int node : lattice->interior_nodes()) {
        const auto c = lattice->coords(node);
        if (c[0] == 0 || c[0] == lattice->interior_cells(0) - 1) continue;
        CHECK(classical_laplacian(quad, node) == Approx(2.0).epsilon(1e-8));
        CHECK(std::abs(classical_laplacian(affine, node)) < 1e-6);
    }
}

TEST_CASE("fractional Laplacian of cos(pi x) is pi^2 cos(pi x) at s = 1/2") {
    auto lattice = std::make_shared<Lattice>(Domain::interval(0.0, 1.0), 1.0 / 256.0, 50.0);
    NonlocalOperator op(lattice, 0.5);
    GridField f = sample(lattice, cos_pi);
    f.far_value() = 0.0;
    double worst = 0.0;
    for (int node : lattice->interior_nodes()) {
        const double x = lattice->position(node)[0];
        worst = std::max(worst, std::abs(fractional_laplacian(f, op, node) - kPi * kPi * cos_pi(x)));
    }
    CHECK(worst < 0.02 * kPi * kPi);
}

TEST_CASE("fractional Laplacian converges at first order or better for s = 0.3") {
    const double s = 0.3;
    std::vector<double> errors;
    for (double dx : {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0}) {
        auto lattice = std::make_shared<Lattice>(Domain::interval(0.0, 1.0), dx, 4.0);
        NonlocalOperator op(lattice, s);
        GridField f = sample(lattice, cos_pi);
        f.far_value() = 0.0;
        double worst = 0.0;
        const auto& interior = lattice->interior_nodes();
        for (std::size_t k = 0; k < interior.size(); k += interior.size() / 8) {
            const double x = lattice->position(interior[k])[0];
            const double ref = truncated_cos_reference(x, lattice->box_lo()[0], lattice->box_hi()[0], s);
            worst = std::max(worst, std::abs(fractional_laplacian(f, op, interior[k]) - ref));
        }
        errors.push_back(worst);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        MESSAGE("observed order " << order);
        CHECK(order >= 1.0);
    }
}

TEST_CASE("pure diffusion relaxes cos(pi x) + 1 with the Neumann rate") {
    const double alpha = 1.0 / 6.0, t = 0.5;
    PdeSolver solver(Domain::interval(0.0, 1.0), 0.5, {alpha, 0.0, 0.0}, {1.0 / 256.0, 1.0});
    auto ic = InitialCondition::function([](const Point& x) { return 1.0 + cos_pi(x[0]); }, 2.0);
    auto snaps = solver.solve(solver.initial_field(ic), t, {});
    const GridField& u = snaps.back().field;
    double err = 0.0, ref = 0.0;
    for (int node : solver.lattice().interior_nodes()) {
        const double x = solver.lattice().position(node)[0];
        const double exact = 1.0 + std::exp(-kPi * kPi * alpha * t) * cos_pi(x);
        err += std::pow(u.values()[node] - exact, 2);
        ref += exact * exact;
    }
    CHECK(std::sqrt(err / ref) < 0.01);
    CHECK(snaps.back().time == t);
}

TEST_CASE("mass is conserved and the long-time limit is flat") {
    const ProcessParams params(0.5, 0.5, 1e-3);
    const auto coeff = EffectiveCoefficients::from_process(params, 1);
    PdeSolver solver(Domain::interval(0.0, 1.0), 0.5, coeff, {1.0 / 64.0, 5.0});
    GridField f = solver.initial_field(InitialCondition::point_mass(Point{0.3}));
    CHECK(f.mass() == Approx(1.0).epsilon(1e-14));
    const double dt = solver.max_stable_dt();
    for (int k = 0; k < 200; ++k) solver.step(f, dt);
    CHECK(std::abs(f.mass() - 1.0) < 1e-10);
    CHECK(neumann_nonlocal_residual(f, solver.op()) < 1e-10);

    auto snaps = solver.solve(solver.initial_field(InitialCondition::point_mass(Point{0.3})), 12.0, {1.0});
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].time == 1.0);
    for (double v : snaps.back().field.interior_values()) CHECK(v == Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(snaps.back().mass - 1.0) < 1e-9);
}

TEST_CASE("mass is conserved in 2D") {
    const ProcessParams params(0.6, 0.4, 1e-2);
    const auto coeff = EffectiveCoefficients::from_process(params, 2);
    PdeSolver solver(Domain::rectangle({0.0, 0.0}, {1.0, 0.5}), 0.6, coeff, {1.0 / 16.0, 1.0});
    GridField f = solver.initial_field(InitialCondition::point_mass(Point{0.3, 0.2}));
    CHECK(f.mass() == Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 50; ++k) solver.step(f, solver.max_stable_dt());
    CHECK(std::abs(f.mass() - 1.0) < 1e-10);
    for (double v : f.interior_values()) CHECK(v >= 0.0);
}

TEST_CASE("pure jumps spread mass further than pure diffusion") {
    const Domain d = Domain::interval(0.0, 1.0);
    const GridSpec grid{1.0 / 128.0, 5.0};
    double tail[2];
    for (int which = 0; which < 2; ++which) {
        const ProcessParams params(0.5, which == 0 ? 0.0 : 1.0, 1e-3);
        PdeSolver solver(d, 0.5, EffectiveCoefficients::from_process(params, 1), grid);
        auto snaps = solver.solve(solver.initial_field(InitialCondition::point_mass(Point{0.5})), 0.01, {});
        double mass = 0.0;
        for (int node : solver.lattice().interior_nodes())
            if (std::abs(solver.lattice().position(node)[0] - 0.5) > 0.3)
                mass += snaps.back().field.values()[node] * solver.lattice().cell_volume();
        tail[which] = mass;
    }
    CHECK(tail[1] > 100.0 * std::max(tail[0], 1e-12));
}

TEST_CASE("snapshot times are hit exactly") {
    PdeSolver solver(Domain::interval(0.0, 1.0), 0.5, {0.1, 0.1, 0.0}, {1.0 / 32.0, 1.0});
    auto snaps = solver.solve(solver.initial_field(InitialCondition::uniform()), 0.3, {0.0, 0.1, 0.25});
    REQUIRE(snaps.size() == 4);
    CHECK(snaps[0].time == 0.0);
    CHECK(snaps[1].time == 0.1);
    CHECK(snaps[2].time == 0.25);
    CHECK(snaps[3].time == 0.3);
    for (const auto& s : snaps) CHECK(s.dt <= solver.max_stable_dt() * (1.0 + 1e-12));
}

TEST_CASE("lattice preconditions") {
    CHECK_THROWS_AS(Lattice(Domain::disk({0.0, 0.0}, 1.0), 0.1, 1.0), PreconditionError);
    CHECK_THROWS_AS(Lattice(Domain::interval(0.0, 1.0), 0.3, 1.0), ConfigError);
    CHECK_THROWS_AS(PdeSolver(Domain::interval(0.0, 1.0), 0.5, {-1.0, 0.0, 0.0}, {}), ConfigError);
    Lattice L(Domain::interval(0.0, 1.0), 0.25, 1.0);
    CHECK(L.band() == 4);
    CHECK(L.size() == 12);
    CHECK(L.interior_nodes().size() == 4);
    CHECK(L.locate(Point{0.1}) == 4);
    CHECK(L.position(4)[0] == Approx(0.125));
}
