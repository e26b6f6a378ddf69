#pragma once

// Wedge quadrature: tensor Gauss–Legendre in θ times geometrically graded
// Gauss–Legendre panels in r, Jacobian r dr dθ.
//
// Radial panels are [2^{−j−1}, 2^{−j}] for j = 0..panels−1. The innermost
// interval [0, a], a = 2^{−panels}, is mapped by r = a·u^p with
// p = 1/(2+σ), where σ is the vertex exponent of the integrand
// (f ~ r^σ). This turns the leading r^{1+σ} behaviour of f·r into a
// constant in u, so integrable singularities such as |G|² ~ r^{−2β} are
// integrated at full Gauss order.

#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qhybrid {

struct GaussRule {
    std::vector<double> nodes;    // on (−1, 1)
    std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace detail

/// n-point Gauss–Legendre rule on (−1, 1); rules are cached per n.
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1)
        throw domain_error("gauss_legendre: order must be positive");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

struct QuadratureControl {
    int radial_order = 16;
    int angular_order = 32;
    int panels = 15;
    /// Reported error estimate above this raises accuracy_error.
    double tol = 1e-8;
    /// Compute a second pass at doubled order for the error estimate.
    bool estimate_error = true;
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
};

namespace detail {

/// ∫_0^1 g(r) r dr with one fixed Gauss order per panel.
template <class T, class G>
T radial_pass(G&& g, int order, int panels, double vertex_exponent) {
    const GaussRule& rule = gauss_legendre(order);
    T total{};
    double hi = 1.0;
    for (int j = 0; j < panels; ++j) {
        const double lo = 0.5 * hi;
        const double mid = 0.5 * (hi + lo);
        const double half = 0.5 * (hi - lo);
        T panel{};
        for (int i = 0; i < order; ++i) {
            const double r = mid + half * rule.nodes[i];
            panel += g(r) * (rule.weights[i] * r);
        }
        total += panel * half;
        hi = lo;
    }
    // Inner interval [0, a] with r = a·u^p.
    const double a = hi;
    const double p = 1.0 / (2.0 + vertex_exponent);
    T inner{};
    for (int i = 0; i < order; ++i) {
        const double u = 0.5 * (1.0 + rule.nodes[i]);
        const double up = std::pow(u, p);
        const double r = a * up;
        // dr = a p u^{p−1} du, du = dt/2
        const double jac = a * p * up / u * 0.5;
        inner += g(r) * (rule.weights[i] * r * jac);
    }
    return total + inner;
}

template <class T, class H>
T angular_pass(H&& h, const WedgeGeometry& geom, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double half = 0.5 * geom.omega();
    T total{};
    for (int i = 0; i < order; ++i)
        total += h(half * (1.0 + rule.nodes[i])) * rule.weights[i];
    return total * half;
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T>
void check_estimate(const QuadratureResult<T>& res, const QuadratureControl& ctl, const char* what) {
    if (ctl.estimate_error && !(res.error <= ctl.tol * std::max(1.0, magnitude(res.value))))
        throw accuracy_error(std::string(what) + ": quadrature error estimate above tolerance", res.error);
}

}  // namespace detail

/// ∫_0^1 g(r) r dr. vertex_exponent is σ in g ~ r^σ as r → 0 (σ > −2).
template <class T = double, class G>
QuadratureResult<T> radial_integral(G&& g, double vertex_exponent, const QuadratureControl& ctl = {}) {
    if (!(vertex_exponent > -2.0))
        throw domain_error("radial_integral: vertex exponent must exceed -2");
    QuadratureResult<T> res;
    if (!ctl.estimate_error) {
        res.value = detail::radial_pass<T>(g, ctl.radial_order, ctl.panels, vertex_exponent);
        return res;
    }
    const T lo = detail::radial_pass<T>(g, ctl.radial_order, ctl.panels, vertex_exponent);
    res.value = detail::radial_pass<T>(g, 2 * ctl.radial_order, ctl.panels, vertex_exponent);
    res.error = detail::magnitude(res.value - lo);
    detail::check_estimate(res, ctl, "radial_integral");
    return res;
}

/// ∫_0^{π/β} h(θ) dθ by Gauss–Legendre.
template <class T = double, class H>
QuadratureResult<T> angular_integral(H&& h, const WedgeGeometry& geom, const QuadratureControl& ctl = {}) {
    QuadratureResult<T> res;
    if (!ctl.estimate_error) {
        res.value = detail::angular_pass<T>(h, geom, ctl.angular_order);
        return res;
    }
    const T lo = detail::angular_pass<T>(h, geom, ctl.angular_order);
    res.value = detail::angular_pass<T>(h, geom, 2 * ctl.angular_order);
    res.error = detail::magnitude(res.value - lo);
    detail::check_estimate(res, ctl, "angular_integral");
    return res;
}

/// ∫_W f(r, θ) r dr dθ over the tensor grid.
template <class T = double, class F>
QuadratureResult<T> wedge_quadrature(F&& f, const WedgeGeometry& geom, double vertex_exponent,
                                     const QuadratureControl& ctl = {}) {
    auto pass = [&](int radial_order, int angular_order) {
        auto radial = [&](double r) {
            return detail::angular_pass<T>([&](double th) { return f(r, th); }, geom, angular_order);
        };
        return detail::radial_pass<T>(radial, radial_order, ctl.panels, vertex_exponent);
    };
    if (!(vertex_exponent > -2.0))
        throw domain_error("wedge_quadrature: vertex exponent must exceed -2");
    QuadratureResult<T> res;
    if (!ctl.estimate_error) {
        res.value = pass(ctl.radial_order, ctl.angular_order);
        return res;
    }
    const T lo = pass(ctl.radial_order, ctl.angular_order);
    res.value = pass(2 * ctl.radial_order, 2 * ctl.angular_order);
    res.error = detail::magnitude(res.value - lo);
    detail::check_estimate(res, ctl, "wedge_quadrature");
    return res;
}

/// Default vertex exponent for the wedge: −2β, the behaviour of |G_z|².
inline double singular_vertex_exponent(const WedgeGeometry& geom) { return -2.0 * geom.beta(); }

}  // namespace qhybrid
