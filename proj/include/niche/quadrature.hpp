#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace niche::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

namespace detail {

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

// 21-point Kronrod rule with the embedded 10-point Gauss rule; the error
// estimate is |K - G| on the interval.
template <class F>
Piece gk21(F& f, double a, double b) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    static const auto& xk = Kronrod::abscissa();
    static const auto& wk = Kronrod::weights();
    static const auto& wg = Gauss::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(mid);
    double kron = wk[0] * fc, gauss = 0.0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double d = half * xk[i];
        const double sum = f(mid - d) + f(mid + d);
        kron += wk[i] * sum;
        if (i % 2 == 1) gauss += wg[i / 2] * sum;
    }
    return {a, b, kron * half, std::abs(kron - gauss) * half};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21 point) on [a, b]. Points in `breaks`
/// that fall inside (a, b) start as subinterval edges, so kinks and jumps of
/// the integrand located there cost nothing.
template <class F>
double integrate(F&& f, double a, double b, std::span<const double> breaks = {},
                 const Options& opt = {}) {
    if (!(b > a)) return 0.0;
    std::vector<double> edges{a};
    for (double x : breaks)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<detail::Piece> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        heap.push_back(detail::gk21(f, edges[i], edges[i + 1]));
        total += heap.back().value;
        err += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end());
    int count = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
           count < opt.max_intervals) {
        std::pop_heap(heap.begin(), heap.end());
        const detail::Piece worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval cannot be split further; keep it and stop refining.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        const detail::Piece left = detail::gk21(f, worst.a, mid);
        const detail::Piece right = detail::gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++count;
    }
    // Re-sum in position order so the result does not carry update drift.
    std::sort(heap.begin(), heap.end(),
              [](const detail::Piece& l, const detail::Piece& r) { return l.a < r.a; });
    double sum = 0.0;
    for (const auto& p : heap) sum += p.value;
    return sum;
}

/// Integral over [a, inf) of an integrand decaying like (x - a)^(-1-q).
/// Uses x = a + w (u^(-1/q) - 1), which maps the tail onto u in (0, 1] with
/// a bounded integrand, so no truncation radius is involved.
template <class F>
double integrate_tail(F&& f, double a, double w, double q, const Options& opt = {}) {
    auto g = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double t = std::pow(u, -1.0 / q);
        const double x = a + w * (t - 1.0);
        if (!std::isfinite(x)) return 0.0;
        const double jac = w / q * t / u;
        const double v = f(x) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(g, 0.0, 1.0, {}, opt);
}

}  // namespace niche::quad
