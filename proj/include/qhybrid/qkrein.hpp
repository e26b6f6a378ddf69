#pragma once

// Kreĭn Q-functions of the wedge, the lead and the hybrid, and the wedge
// deficiency functions.
//
//   Q^W_z = −J̃_{−β}(z)/J̃_β(z),   Q^L_z = i/√z,   Q^H_z = diag(Q^L_z, Q^W_z + 1)
//   G(r,θ)   = (r^β − r^{−β}) sin βθ / √π
//   G_z(r,θ) = (−Q^W_z J̃_β(zr²) r^β − J̃_{−β}(zr²) r^{−β}) sin βθ / √π
//   S(r,θ)   = r^β sin βθ / √π
//
// Q^W is always evaluated through the J̃ ratio, for complex, negative and
// positive arguments alike; the I_ν / J_ν forms appear only in tests.

#include <qhybrid/branch.hpp>
#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/matrix2.hpp>
#include <qhybrid/quadrature.hpp>
#include <qhybrid/specfun.hpp>
#include <qhybrid/wide.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

namespace qhybrid {

/// |J̃_β(z)| below this is treated as sitting on a Friedrichs eigenvalue λ²_{m,β}.
inline constexpr double pole_guard = 1e-13;

/// The λ²_{m,β} closest to x, NaN when none lies inside the series window.
inline double nearest_friedrichs_pole(const WedgeGeometry& geom, double x, const SeriesControl& ctl = {}) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double j : bessel_zeros(geom.beta(), ctl)) {
        const double pole = j * j;
        if (std::isnan(best) || std::abs(pole - x) < std::abs(best - x))
            best = pole;
    }
    return best;
}

namespace detail {

struct wedge_series {
    wide_complex plus;    // J̃_β(z)
    wide_complex minus;   // J̃_{−β}(z)
    wide_complex dplus;   // J̃'_β(z)
    wide_complex dminus;  // J̃'_{−β}(z)
};

inline wedge_series wedge_pair(const WedgeGeometry& geom, std::complex<double> z, const SeriesControl& ctl,
                               bool derivative) {
    auto p = tilde_j_series<wide_real>(geom.beta(), z, ctl, derivative, false);
    auto m = tilde_j_series<wide_real>(-geom.beta(), z, ctl, derivative, false);
    if (l1_norm(p.value) < pole_guard) {
        throw pole_error("Q^W: z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                             ") is at a zero of J~_beta",
                         nearest_friedrichs_pole(geom, z.real(), ctl));
    }
    return {p.value, m.value, p.derivative, m.derivative};
}

}  // namespace detail

/// Q^W_z = −J̃_{−β}(z)/J̃_β(z).
inline std::complex<double> q_wedge(const WedgeGeometry& geom, std::complex<double> z,
                                    const SeriesControl& ctl = {}) {
    const auto s = detail::wedge_pair(geom, z, ctl, false);
    return (-(s.minus / s.plus)).to_complex();
}

inline double q_wedge(const WedgeGeometry& geom, double lambda, const SeriesControl& ctl = {}) {
    return q_wedge(geom, std::complex<double>(lambda, 0.0), ctl).real();
}

/// dQ^W/dz from the term-wise differentiated series.
inline std::complex<double> q_wedge_deriv(const WedgeGeometry& geom, std::complex<double> z,
                                          const SeriesControl& ctl = {}) {
    const auto s = detail::wedge_pair(geom, z, ctl, true);
    // d/dz(−A/B) = (A B' − A' B)/B²
    const wide_complex num = s.minus * s.dplus - s.dminus * s.plus;
    return (num / (s.plus * s.plus)).to_complex();
}

inline double q_wedge_deriv(const WedgeGeometry& geom, double lambda, const SeriesControl& ctl = {}) {
    return q_wedge_deriv(geom, std::complex<double>(lambda, 0.0), ctl).real();
}

/// Q^W_z + 1 without cancellation near z = 0: (J̃_β − J̃_{−β})/J̃_β with the
/// leading ones removed before subtracting.
inline std::complex<double> q_wedge_plus_one(const WedgeGeometry& geom, std::complex<double> z,
                                             const SeriesControl& ctl = {}) {
    const auto s = detail::wedge_pair(geom, z, ctl, false);
    auto tp = detail::tilde_j_series<wide_real>(geom.beta(), z, ctl, false, true).value;
    auto tm = detail::tilde_j_series<wide_real>(-geom.beta(), z, ctl, false, true).value;
    return ((tp - tm) / s.plus).to_complex();
}

/// Q^L_z = i/√z on the physical sheet (Im √z > 0; √λ > 0 for λ > 0).
inline std::complex<double> q_lead(std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0))
        throw domain_error("q_lead: z = 0");
    return std::complex<double>(0.0, 1.0) / sqrt_physical(z);
}

/// Q^H_z = diag(Q^L_z, Q^W_z + 1).
inline Matrix2c q_hybrid(const WedgeGeometry& geom, std::complex<double> z, const SeriesControl& ctl = {}) {
    return Matrix2c::diagonal(q_lead(z), q_wedge(geom, z, ctl) + 1.0);
}

inline double eval_G(const WedgeGeometry& geom, const WedgePoint& p) {
    p.validate(geom);
    const double b = geom.beta();
    return (std::pow(p.r, b) - std::pow(p.r, -b)) * std::sin(b * p.theta) / std::sqrt(std::numbers::pi);
}

inline double eval_S(const WedgeGeometry& geom, const WedgePoint& p) {
    p.validate(geom);
    const double b = geom.beta();
    return std::pow(p.r, b) * std::sin(b * p.theta) / std::sqrt(std::numbers::pi);
}

/// Radial factor of G_z, i.e. G_z(r,θ) = gz_radial(r)·sin βθ. q is Q^W_z.
inline std::complex<double> gz_radial(const WedgeGeometry& geom, std::complex<double> z, std::complex<double> q,
                                      double r, const SeriesControl& ctl = {}) {
    const double b = geom.beta();
    const std::complex<double> zr = z * (r * r);
    const std::complex<double> jp = tilde_j(b, zr, ctl);
    const std::complex<double> jm = tilde_j(-b, zr, ctl);
    return (-q * jp * std::pow(r, b) - jm * std::pow(r, -b)) / std::sqrt(std::numbers::pi);
}

inline std::complex<double> eval_Gz(const WedgeGeometry& geom, std::complex<double> z, const WedgePoint& p,
                                    const SeriesControl& ctl = {}) {
    p.validate(geom);
    const std::complex<double> q = q_wedge(geom, z, ctl);
    return gz_radial(geom, z, q, p.r, ctl) * std::sin(geom.beta() * p.theta);
}

/// Radial factor of G − G_z, summed without the r^{−β} cancellation:
/// ((1 + Q) + Q (J̃_β(zr²) − 1)) r^β + (J̃_{−β}(zr²) − 1) r^{−β}, over √π.
/// qp1 is Q^W_z + 1.
inline std::complex<double> g_minus_gz_radial(const WedgeGeometry& geom, std::complex<double> z,
                                              std::complex<double> qp1, double r, const SeriesControl& ctl = {}) {
    const double b = geom.beta();
    const std::complex<double> zr = z * (r * r);
    const auto tp = detail::tilde_j_series<wide_real>(b, zr, ctl, false, true).value.to_complex();
    const auto tm = detail::tilde_j_series<wide_real>(-b, zr, ctl, false, true).value.to_complex();
    const std::complex<double> q = qp1 - 1.0;
    return ((qp1 + q * tp) * std::pow(r, b) + tm * std::pow(r, -b)) / std::sqrt(std::numbers::pi);
}

inline std::complex<double> eval_G_minus_Gz(const WedgeGeometry& geom, std::complex<double> z,
                                            const WedgePoint& p, const SeriesControl& ctl = {}) {
    p.validate(geom);
    const std::complex<double> qp1 = q_wedge_plus_one(geom, z, ctl);
    return g_minus_gz_radial(geom, z, qp1, p.r, ctl) * std::sin(geom.beta() * p.theta);
}

// ---------------------------------------------------------------------------
// Renormalized vertex trace

struct TraceControl {
    int j_first = 3;
    int j_last = 12;
    /// Exponents p of the successive corrections c·r^p removed by Richardson
    /// steps. Empty means {2 − 2β, 2}: the r^{2−β} term of J̃_{−β}(zr²) r^{−β}
    /// and the r^{2+β} term of J̃_β(zr²) r^β.
    std::vector<double> exponents;
    /// Maximum allowed difference between the last two extrapolants.
    double tol = 1e-5;
    /// Vertex exponent of the traced function (f ~ r^σ), used by the radial grading.
    double vertex_exponent = std::numeric_limits<double>::quiet_NaN();
    QuadratureControl quad{16, 32, 15, 1e-8, false};
};

template <class T>
struct TraceResult {
    T value{};
    double error = 0.0;
    /// Scaled integrals r_j^{−β}∫_W f(r_j x) dx for r_j = 2^{−j}.
    std::vector<T> samples;
};

/// τf = (√π β(β+2)/2)·lim_{r↓0} r^{−β} ∫_W f(r x) dx, by Richardson
/// extrapolation over r_j = 2^{−j}. f is called as f(r, θ).
template <class F>
auto tau_trace(F&& f, const WedgeGeometry& geom, const TraceControl& ctl = {}) {
    using T = std::decay_t<std::invoke_result_t<F&, double, double>>;
    const double b = geom.beta();
    if (ctl.j_last - ctl.j_first < 2)
        throw domain_error("tau_trace: need at least three radii");
    std::vector<double> exps = ctl.exponents;
    if (exps.empty())
        exps = {2.0 - 2.0 * b, 2.0};
    const double sigma = std::isnan(ctl.vertex_exponent) ? b : ctl.vertex_exponent;
    const double scale = 0.5 * std::sqrt(std::numbers::pi) * b * (b + 2.0);

    TraceResult<T> res;
    for (int j = ctl.j_first; j <= ctl.j_last; ++j) {
        const double r = std::ldexp(1.0, -j);
        auto scaled = [&](double rho, double th) { return f(r * rho, th); };
        const T integral = wedge_quadrature<T>(scaled, geom, sigma, ctl.quad).value;
        res.samples.push_back(integral * (scale * std::pow(r, -b)));
    }

    std::vector<T> level = res.samples;
    const std::size_t levels = std::min(exps.size(), level.size() - 2);
    for (std::size_t l = 0; l < levels; ++l) {
        const double f2 = std::pow(2.0, exps[l]);
        std::vector<T> next;
        for (std::size_t i = 0; i + 1 < level.size(); ++i)
            next.push_back((level[i + 1] * f2 - level[i]) / (f2 - 1.0));
        level = std::move(next);
    }
    res.value = level.back();
    res.error = detail::magnitude(level.back() - level[level.size() - 2]);
    if (!(res.error <= ctl.tol))
        throw accuracy_error("tau_trace: extrapolation did not settle", res.error);
    return res;
}

// ---------------------------------------------------------------------------
// ‖G_λ‖² and pairings

/// ‖G_λ‖² = dQ^W/dλ, from the analytic derivative.
inline double gz_norm_sq(const WedgeGeometry& geom, double lambda, const SeriesControl& ctl = {}) {
    return q_wedge_deriv(geom, lambda, ctl);
}

/// ∫_W G_w G_z dx by quadrature (bilinear: no conjugation). For real w = z
/// this is ‖G_λ‖²; for complex arguments it is the pairing that satisfies
/// (z − w)∫G_w G_z = Q^W_z − Q^W_w.
inline QuadratureResult<std::complex<double>> gz_pairing(const WedgeGeometry& geom, std::complex<double> w,
                                                         std::complex<double> z, const QuadratureControl& qc = {},
                                                         const SeriesControl& ctl = {}) {
    const std::complex<double> qw = q_wedge(geom, w, ctl);
    const std::complex<double> qz = q_wedge(geom, z, ctl);
    auto radial = radial_integral<std::complex<double>>(
        [&](double r) { return gz_radial(geom, w, qw, r, ctl) * gz_radial(geom, z, qz, r, ctl); },
        singular_vertex_exponent(geom), qc);
    const double b = geom.beta();
    auto angular = angular_integral<double>([&](double th) { return std::pow(std::sin(b * th), 2); }, geom, qc);
    QuadratureResult<std::complex<double>> out;
    out.value = radial.value * angular.value;
    out.error = radial.error * std::abs(angular.value) + angular.error * std::abs(radial.value);
    return out;
}

/// ∫_W G G_z dx, so that Q^W_z = z·gz_pairing_with_G − 1.
inline QuadratureResult<std::complex<double>> g_pairing(const WedgeGeometry& geom, std::complex<double> z,
                                                        const QuadratureControl& qc = {},
                                                        const SeriesControl& ctl = {}) {
    const double b = geom.beta();
    const std::complex<double> qz = q_wedge(geom, z, ctl);
    auto radial = radial_integral<std::complex<double>>(
        [&](double r) {
            const double g = (std::pow(r, b) - std::pow(r, -b)) / std::sqrt(std::numbers::pi);
            return g * gz_radial(geom, z, qz, r, ctl);
        },
        singular_vertex_exponent(geom), qc);
    auto angular = angular_integral<double>([&](double th) { return std::pow(std::sin(b * th), 2); }, geom, qc);
    QuadratureResult<std::complex<double>> out;
    out.value = radial.value * angular.value;
    out.error = radial.error * std::abs(angular.value) + angular.error * std::abs(radial.value);
    return out;
}

/// ‖G_λ‖² by wedge quadrature; the cross-check path for gz_norm_sq.
inline QuadratureResult<double> gz_norm_sq_quadrature(const WedgeGeometry& geom, double lambda,
                                                      const QuadratureControl& qc = {},
                                                      const SeriesControl& ctl = {}) {
    auto p = gz_pairing(geom, lambda, lambda, qc, ctl);
    return {p.value.real(), p.error};
}

}  // namespace qhybrid
