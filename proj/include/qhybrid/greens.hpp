#pragma once

// Resolvent kernels, all with the convention R_z = (z − H)^{−1}:
//
//   R^N  Neumann half-line,
//   R^F  Friedrichs (Dirichlet) wedge,
//   R^α  non-Friedrichs wedge extension, R^F − (α − Q^W_z)^{−1} G_z ⊗ G_z,
//   R^Θ  hybrid, diag(R^N, R^F) minus the rank-two correction with
//        M = ((γ − Q^L_z, ε), (ε, α − Q^W_z)).
//
// R^F is evaluated per angular mode. With ν = nβ and
// h_ν(r, r') the radial Green's function of ∂²_r + r^{−1}∂_r − ν²/r² + z
// (regular at 0, zero at r = 1),
//
//   R^F(p, q) = K_0(p, q) + Σ_n (2β/π) sin νθ sin νθ' (h_ν − h⁰_ν)(r, r'),
//
// where h⁰_ν = −(ρ^ν − (rr')^ν)/(2ν), ρ = r_</r_>, is the z = 0 radial
// function and K_0 its angular sum in closed form (the Laplace Green's
// function of the sector). The log singularity at p = q lives entirely in
// K_0; the corrections decay like n^{−3}.

#include <qhybrid/branch.hpp>
#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/matrix2.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/spectra.hpp>
#include <qhybrid/specfun.hpp>
#include <qhybrid/wide.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace qhybrid {

/// −(i/2)(e^{i√z|x−y|} + e^{i√z(x+y)})/√z, Im √z > 0.
inline std::complex<double> resolvent_lead(std::complex<double> z, double x, double y) {
    if (z.imag() == 0.0 && z.real() >= 0.0)
        throw domain_error("resolvent_lead: z on the cut [0, inf)");
    if (!(x >= 0.0) || !(y >= 0.0))
        throw domain_error("resolvent_lead: x, y must be non-negative");
    const std::complex<double> k = sqrt_physical(z);
    const std::complex<double> i(0.0, 1.0);
    return -0.5 * i * (std::exp(i * k * std::abs(x - y)) + std::exp(i * k * (x + y))) / k;
}

struct FriedrichsControl {
    /// Target for the estimated tail of the angular sum.
    double mode_tol = 1e-10;
    int max_modes = 200000;
    /// Orders within this distance of an integer are interpolated.
    double integer_guard = 1e-6;
};

template <class T>
struct KernelValue {
    T value{};
    double estimate = 0.0;
    int modes = 0;
};

namespace detail {

inline wide_real wide_ipow(wide_real x, int n) {
    wide_real out = 1;
    wide_real base = x;
    for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
        if (e & 1u)
            out *= base;
        base *= base;
    }
    return out;
}

/// e^x in wide precision for |x| ≲ 1.
inline wide_real wide_exp_small(wide_real x) {
    wide_real term = 1;
    wide_real sum = 1;
    for (int k = 1; k < 60; ++k) {
        term *= x / k;
        sum += term;
        if ((term < 0 ? -term : term) < wide_real(1e-36))
            break;
    }
    return sum;
}

/// x^(n + d) with |d| small, in wide precision.
inline wide_real wide_pow_near_int(double x, int n, double d) {
    return wide_ipow(static_cast<wide_real>(x), n) * wide_exp_small(static_cast<wide_real>(d * std::log(x)));
}

/// J̃_{−ν}(x) − 1 for ν > 1, summed only while k < ν − 1. Returns nothing
/// when the terms are still significant on reaching the pole region
/// k ≈ ν. A tail dropped there is of order (|x|/4)^ν/(Γ(ν)²·dist(ν, ℤ)),
/// and its pole part cancels between the two radial solutions in the
/// Green's function, so both series must be cut by this same rule.
inline std::optional<wide_complex> minus_order_before_pole(double nu, std::complex<double> x) {
    const wide_complex step{static_cast<wide_real>(-x.real() / 4.0), static_cast<wide_real>(-x.imag() / 4.0)};
    const double xq = std::abs(x) / 4.0;
    wide_complex term{wide_real(1), wide_real(0)};
    wide_complex sum{};
    for (int k = 1; k + 1 < nu; ++k) {
        term *= step;
        term *= wide_real(1) / (static_cast<wide_real>(k) * (static_cast<wide_real>(k) - static_cast<wide_real>(nu)));
        sum += term;
        // Past the peak (xq < k(ν−k) for the next index) and below 1e−40.
        if (xq < (k + 1) * (nu - k - 1) && l1_norm(term) < 1e-40)
            return sum;
    }
    return std::nullopt;
}

/// Combines the series pieces into (h_ν − h⁰_ν)(r_<, r_>).
/// tp = J̃_ν(z) − 1, tm = J̃_{−ν}(z) − 1, a = J̃_ν(z r_<²) − 1,
/// b = J̃_{−ν}(z r_>²) − 1, e = J̃_ν(z r_>²) − 1.
inline std::complex<double> radial_combine(double nu, const wide_complex& tp, const wide_complex& tm,
                                           const wide_complex& a, const wide_complex& b, const wide_complex& e,
                                           wide_real rho_nu, wide_real image_nu) {
    const wide_complex one{wide_real(1), wide_real(0)};
    // J̃_ν(x)J̃_{−ν}(y) − 1 and c·J̃_ν(x)J̃_ν(y) − 1, c = J̃_{−ν}(z)/J̃_ν(z),
    // with the leading ones cancelled analytically.
    const wide_complex x1 = a + b + a * b;
    const wide_complex x2 = (tm - tp + (one + tm) * (a + e + a * e)) / (one + tp);
    const wide_complex bracket = x1 * rho_nu - x2 * image_nu;
    return (bracket * (wide_real(-1) / (wide_real(2) * static_cast<wide_real>(nu)))).to_complex();
}

inline wide_complex plus_order_minus_one(double nu, std::complex<double> x, const SeriesControl& ctl) {
    return tilde_j_series_any_order<wide_real>(nu, x, ctl, false, true).value;
}

inline void check_friedrichs_pole(double nu, std::complex<double> z, const wide_complex& tp) {
    const wide_complex one{wide_real(1), wide_real(0)};
    if (l1_norm(one + tp) < pole_guard)
        throw pole_error("resolvent_friedrichs: z is a Friedrichs eigenvalue of order " + std::to_string(nu),
                         z.real());
}

/// (h_ν − h⁰_ν)(r_<, r_>) with the full J̃_{−ν} series; ν must not be an integer.
inline std::complex<double> radial_correction_full(double nu, std::complex<double> z, double rl, double rg,
                                                   wide_real rho_nu, wide_real image_nu, const SeriesControl& ctl) {
    // J̃_{−ν} terms cannot be declared decreasing before k passes ν.
    SeriesControl sc = ctl;
    sc.max_terms = static_cast<int>(2.0 * nu) + ctl.max_terms;
    const wide_complex tp = plus_order_minus_one(nu, z, ctl);
    check_friedrichs_pole(nu, z, tp);
    const wide_complex tm = tilde_j_series_any_order<wide_real>(-nu, z, sc, false, true).value;
    const wide_complex b = tilde_j_series_any_order<wide_real>(-nu, z * (rg * rg), sc, false, true).value;
    return radial_combine(nu, tp, tm, plus_order_minus_one(nu, z * (rl * rl), ctl), b,
                          plus_order_minus_one(nu, z * (rg * rg), ctl), rho_nu, image_nu);
}

inline std::complex<double> radial_correction(double nu, std::complex<double> z, double rl, double rg,
                                              const FriedrichsControl& fc, const SeriesControl& ctl) {
    // Large orders: both J̃_{−ν} series settle before the pole region.
    if (nu > 1.0) {
        const auto tm = minus_order_before_pole(nu, z);
        const auto b = tm ? minus_order_before_pole(nu, z * (rg * rg)) : std::nullopt;
        if (tm && b) {
            const wide_complex tp = plus_order_minus_one(nu, z, ctl);
            check_friedrichs_pole(nu, z, tp);
            return radial_combine(nu, tp, *tm, plus_order_minus_one(nu, z * (rl * rl), ctl), *b,
                                  plus_order_minus_one(nu, z * (rg * rg), ctl),
                                  static_cast<wide_real>(std::pow(rl / rg, nu)),
                                  static_cast<wide_real>(std::pow(rl * rg, nu)));
        }
    }
    const double n = std::round(nu);
    if (std::abs(nu - n) >= fc.integer_guard) {
        return radial_correction_full(nu, z, rl, rg, static_cast<wide_real>(std::pow(rl / rg, nu)),
                                      static_cast<wide_real>(std::pow(rl * rg, nu)), ctl);
    }
    // J̃_{−ν} has a pole at integer ν; the Green's function does not. Interpolate
    // linearly between n ± δ, computing the r-powers in wide precision so the
    // 1/δ parts cancel cleanly.
    const double d = fc.integer_guard;
    const int ni = static_cast<int>(n);
    auto at = [&](double dd) {
        return radial_correction_full(n + dd, z, rl, rg, wide_pow_near_int(rl / rg, ni, dd),
                                      wide_pow_near_int(rl * rg, ni, dd), ctl);
    };
    const std::complex<double> lo = at(-d);
    const std::complex<double> hi = at(d);
    const double t = (nu - (n - d)) / (2.0 * d);
    return lo + (hi - lo) * t;
}

/// Laplace Green's function of the unit sector with Dirichlet walls.
inline double sector_laplace_kernel(const WedgeGeometry& geom, const WedgePoint& p, const WedgePoint& q) {
    const double b = geom.beta();
    const double rl = std::min(p.r, q.r), rg = std::max(p.r, q.r);
    const double s = std::pow(rl / rg, b);
    const double si = std::pow(rl * rg, b);
    const double dm = b * (p.theta - q.theta);
    const double dp = b * (p.theta + q.theta);
    auto piece = [&](double u) {
        // 1 − 2u cos x + u² written as (1 − u)² + 4u sin²(x/2) to keep accuracy near u = 1.
        auto f = [&](double x) {
            const double sh = std::sin(0.5 * x);
            return (1.0 - u) * (1.0 - u) + 4.0 * u * sh * sh;
        };
        return std::log(f(dm) / f(dp));
    };
    return (piece(s) - piece(si)) / (4.0 * std::numbers::pi);
}

}  // namespace detail

/// Friedrichs resolvent kernel R^F_z(p, q), z off {λ²_{m,nβ}}, p ≠ q.
///
/// With c_n = (2β/π)(h_ν − h⁰_ν), the n-th term is
/// c_n·[cos n(A−B) − cos n(A+B)]/2, A = βθ, B = βθ'. Once ν² > 4|z| the
/// |c_n| decrease monotonically (at least like n^{−3}), so by summation by
/// parts the tail after N is at most |c_N|·T with
/// T = min(N/2, (1/|sin((A−B)/2)| + 1/|sin((A+B)/2)|)/2). The reported
/// estimate is 2|c_N|·T and the sum stops once it is below mode_tol for
/// two consecutive n.
inline KernelValue<std::complex<double>> resolvent_friedrichs(const WedgeGeometry& geom, std::complex<double> z,
                                                              const WedgePoint& p, const WedgePoint& q,
                                                              const FriedrichsControl& fc = {},
                                                              const SeriesControl& ctl = {}) {
    p.validate(geom);
    q.validate(geom);
    if (p.r == q.r && p.theta == q.theta)
        throw domain_error("resolvent_friedrichs: coincident points");
    KernelValue<std::complex<double>> out;
    if (p.r == 1.0 || q.r == 1.0 || p.theta == 0.0 || q.theta == 0.0 || p.theta == geom.omega() ||
        q.theta == geom.omega())
        return out;
    const double b = geom.beta();
    const double rl = std::min(p.r, q.r), rg = std::max(p.r, q.r);
    std::complex<double> sum = detail::sector_laplace_kernel(geom, p, q);
    const double pref = 2.0 * b / std::numbers::pi;
    const double dm = std::abs(std::sin(0.5 * b * (p.theta - q.theta)));
    const double dp = std::abs(std::sin(0.5 * b * (p.theta + q.theta)));
    const double abel = 0.5 * ((dm > 0.0 ? 1.0 / dm : std::numeric_limits<double>::infinity()) + (dp > 0.0 ? 1.0 / dp : std::numeric_limits<double>::infinity()));
    int quiet = 0;
    double bound = 0.0;
    int n = 1;
    for (; n <= fc.max_modes; ++n) {
        const double nu = n * b;
        const std::complex<double> c = pref * detail::radial_correction(nu, z, rl, rg, fc, ctl);
        sum += c * (std::sin(nu * p.theta) * std::sin(nu * q.theta));
        bound = 2.0 * std::abs(c) * std::min(0.5 * n, abel);
        if (nu * nu > 4.0 * std::abs(z) && bound < fc.mode_tol) {
            if (++quiet >= 2)
                break;
        } else {
            quiet = 0;
        }
    }
    out.value = sum;
    out.estimate = bound;
    out.modes = std::min(n, fc.max_modes);
    if (n > fc.max_modes)
        throw accuracy_error("resolvent_friedrichs: angular sum not settled within max_modes", bound);
    return out;
}

/// Truncated spectral sum Σ ψ_{m,n}(p)ψ_{m,n}(q)/(z − λ²_{m,nβ}) over λ² ≤ e_window.
/// Converges slowly and only conditionally; kept as an independent
/// cross-check of resolvent_friedrichs.
inline std::complex<double> friedrichs_mode_sum(const WedgeGeometry& geom, std::complex<double> z,
                                                const WedgePoint& p, const WedgePoint& q, double e_window,
                                                const SeriesControl& ctl = {}) {
    std::complex<double> sum = 0.0;
    for (const auto& e : friedrichs_eigenvalues(geom, e_window, ctl)) {
        const double nu = e.n * geom.beta();
        const double norm = 2.0 * std::sqrt(geom.beta() / std::numbers::pi) / bessel_j(nu + 1.0, e.zero, ctl);
        const double fp = norm * bessel_j(nu, e.zero * p.r, ctl) * std::sin(nu * p.theta);
        const double fq = norm * bessel_j(nu, e.zero * q.r, ctl) * std::sin(nu * q.theta);
        sum += fp * fq / (z - e.lambda);
    }
    return sum;
}

/// R^α_z(p, q) = R^F_z(p, q) − (α − Q^W_z)^{−1} G_z(p) G_z(q).
inline KernelValue<std::complex<double>> resolvent_wedge_alpha(const WedgeGeometry& geom, double alpha,
                                                               std::complex<double> z, const WedgePoint& p,
                                                               const WedgePoint& q, const FriedrichsControl& fc = {},
                                                               const SeriesControl& ctl = {}) {
    const std::complex<double> qw = q_wedge(geom, z, ctl);
    const std::complex<double> d = alpha - qw;
    if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(qw)))
        throw pole_error("resolvent_wedge_alpha: z is an eigenvalue of the alpha extension", z.real());
    auto out = resolvent_friedrichs(geom, z, p, q, fc, ctl);
    const double b = geom.beta();
    const std::complex<double> gp = gz_radial(geom, z, qw, p.r, ctl) * std::sin(b * p.theta);
    const std::complex<double> gq = gz_radial(geom, z, qw, q.r, ctl) * std::sin(b * q.theta);
    out.value -= gp * gq / d;
    return out;
}

/// Source and target of a hybrid kernel evaluation. Lead coordinates are
/// x (target) and y (source); wedge points are p (target) and q (source).
/// Blocks whose points are absent are not computed.
struct KernelRequest {
    std::complex<double> z;
    std::optional<double> x;
    std::optional<double> y;
    std::optional<WedgePoint> p;
    std::optional<WedgePoint> q;
    FriedrichsControl modes;
};

struct HybridKernel {
    std::optional<std::complex<double>> lead_lead;    ///< R^Θ(x, y)
    std::optional<std::complex<double>> lead_wedge;   ///< R^Θ(x, q)
    std::optional<std::complex<double>> wedge_lead;   ///< R^Θ(p, y)
    std::optional<std::complex<double>> wedge_wedge;  ///< R^Θ(p, q)
    /// Truncation estimate carried by the R^F part.
    double estimate = 0.0;
    /// M^{−1}, M = ((γ − Q^L_z, ε), (ε, α − Q^W_z)).
    Matrix2c m_inverse;
};

/// M = ((γ − Q^L_z, ε), (ε, α − Q^W_z)). Equal to Θ − Q^H_z: the +1 in
/// Θ₂₂ = α + 1 cancels the +1 in Q^H₂₂ = Q^W + 1.
inline Matrix2c hybrid_coupling_matrix(const WedgeGeometry& geom, const CouplingMatrix& th, std::complex<double> z,
                                       const SeriesControl& ctl = {}) {
    return {th.gamma - q_lead(z), th.eps, th.eps, th.alpha - q_wedge(geom, z, ctl)};
}

/// Block kernel of (z − H_Θ)^{−1}, z off [0, ∞) and off σ_d(H_Θ).
inline HybridKernel resolvent_hybrid(const WedgeGeometry& geom, const CouplingMatrix& th, const KernelRequest& req,
                                     const SeriesControl& ctl = {}) {
    th.validate();
    const std::complex<double> z = req.z;
    if (z.imag() == 0.0 && z.real() >= 0.0)
        throw domain_error("resolvent_hybrid: z on the cut [0, inf)");
    const Matrix2c m = hybrid_coupling_matrix(geom, th, z, ctl);
    const std::complex<double> det = m.det();
    const double scale = std::abs(m(0, 0) * m(1, 1)) + th.eps * th.eps;
    if (std::abs(det) <= 1e-14 * std::max(1.0, scale))
        throw pole_error("resolvent_hybrid: z is an eigenvalue of H_Theta", z.real());
    HybridKernel out;
    out.m_inverse = m.inverse();
    const Matrix2c& mi = out.m_inverse;
    const double b = geom.beta();
    const std::complex<double> qw = q_wedge(geom, z, ctl);
    auto gz = [&](const WedgePoint& w) {
        w.validate(geom);
        return gz_radial(geom, z, qw, w.r, ctl) * std::sin(b * w.theta);
    };
    std::optional<std::complex<double>> ax, ay, gp, gq;
    if (req.x)
        ax = resolvent_lead(z, *req.x, 0.0);
    if (req.y)
        ay = resolvent_lead(z, 0.0, *req.y);
    if (req.p)
        gp = gz(*req.p);
    if (req.q)
        gq = gz(*req.q);
    if (ax && ay)
        out.lead_lead = resolvent_lead(z, *req.x, *req.y) - *ax * mi(0, 0) * *ay;
    if (ax && gq)
        out.lead_wedge = -*ax * mi(0, 1) * *gq;
    if (gp && ay)
        out.wedge_lead = -*gp * mi(1, 0) * *ay;
    if (gp && gq) {
        const auto rf = resolvent_friedrichs(geom, z, *req.p, *req.q, req.modes, ctl);
        out.wedge_wedge = rf.value - *gp * mi(1, 1) * *gq;
        out.estimate = rf.estimate;
    }
    return out;
}

}  // namespace qhybrid
