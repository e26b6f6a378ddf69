#pragma once

// On-shell scattering for the single open channel (the lead). For λ = k² > 0
// the wedge block of S is 1 and
//
//   s11 = ((γ + i/k)(α − Q^W_λ) − ε²) / ((γ − i/k)(α − Q^W_λ) − ε²).
//
// With real data the denominator is the conjugate of the numerator, so
// |s11| = 1. At a pole of Q^W the factor (α − Q^W) dominates and s11 tends to
// (γ + i/k)/(γ − i/k).

#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/matrix2.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/specfun.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace qhybrid {

namespace detail {

inline std::complex<double> point_interaction_phase(double gamma, double k) {
    const std::complex<double> num(gamma, 1.0 / k);
    return num / std::conj(num);
}

/// N/conj(N) with N = (γ + i/k)·a − ε².
inline std::complex<double> s11_from_a(double gamma, double eps, double k, double a) {
    const std::complex<double> n = std::complex<double>(gamma, 1.0 / k) * a - eps * eps;
    if (n == std::complex<double>(0.0, 0.0))
        return point_interaction_phase(gamma, k);
    return n / std::conj(n);
}

}  // namespace detail

/// S(λ) = diag(s11, 1).
inline Matrix2c s_matrix(const WedgeGeometry& geom, const CouplingMatrix& th, double lambda,
                         const SeriesControl& ctl = {}) {
    th.validate();
    if (!(lambda > 0.0))
        throw domain_error("s_matrix: lambda must be positive");
    const double k = std::sqrt(lambda);
    std::complex<double> s11;
    if (th.eps == 0.0) {
        s11 = detail::point_interaction_phase(th.gamma, k);
    } else {
        try {
            s11 = detail::s11_from_a(th.gamma, th.eps, k, th.alpha - q_wedge(geom, lambda, ctl));
        } catch (const pole_error&) {
            s11 = detail::point_interaction_phase(th.gamma, k);
        }
    }
    return Matrix2c::diagonal(s11, 1.0);
}

/// R(k) from the Bessel-ratio form
/// α − Γ(−β)/Γ(β)·(k/2)^{2β}·J_{−β}(k)/J_β(k) of the wedge factor.
inline std::complex<double> reflection(const WedgeGeometry& geom, const CouplingMatrix& th, double k,
                                       const SeriesControl& ctl = {}) {
    th.validate();
    if (!(k > 0.0))
        throw domain_error("reflection: k must be positive");
    if (th.eps == 0.0)
        return detail::point_interaction_phase(th.gamma, k);
    const double b = geom.beta();
    const double jb = bessel_j(b, k, ctl);
    if (std::abs(tilde_j(b, k * k, ctl)) < pole_guard)
        return detail::point_interaction_phase(th.gamma, k);
    const double ratio = std::tgamma(-b) / std::tgamma(b) * std::pow(k / 2.0, 2.0 * b) * bessel_j(-b, k, ctl) / jb;
    return detail::s11_from_a(th.gamma, th.eps, k, th.alpha - ratio);
}

struct ScatteringRecord {
    double lambda = 0.0;
    double k = 0.0;
    std::complex<double> s11;
    std::complex<double> s22{1.0, 0.0};
    std::complex<double> refl;
    /// Principal argument of refl in (−π, π].
    double phase = 0.0;
    /// Continuously unwrapped phase.
    double unwrapped_phase = 0.0;
    /// k² sits on a pole of Q^W; refl is the limit value and the unwrapped
    /// phase is interpolated from the neighbours.
    bool at_pole = false;
};

/// S and R on an ascending k grid with unwrapped phase.
inline std::vector<ScatteringRecord> phase_scan(const WedgeGeometry& geom, const CouplingMatrix& th,
                                                const std::vector<double>& k_grid, const SeriesControl& ctl = {}) {
    th.validate();
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0))
            throw domain_error("phase_scan: k must be positive");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw domain_error("phase_scan: k grid must be strictly increasing");
    }
    std::vector<ScatteringRecord> out(k_grid.size());
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        ScatteringRecord& rec = out[i];
        rec.k = k_grid[i];
        rec.lambda = rec.k * rec.k;
        rec.at_pole = std::abs(tilde_j(geom.beta(), rec.lambda, ctl)) < pole_guard;
        const Matrix2c s = s_matrix(geom, th, rec.lambda, ctl);
        rec.s11 = s(0, 0);
        rec.s22 = s(1, 1);
        rec.refl = rec.s11;
        rec.phase = std::arg(rec.refl);
        if (rec.phase == -std::numbers::pi)
            rec.phase = std::numbers::pi;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    double last = 0.0;
    bool have_last = false;
    for (auto& rec : out) {
        if (rec.at_pole)
            continue;
        double u = rec.phase;
        if (have_last)
            u += two_pi * std::round((last - u) / two_pi);
        rec.unwrapped_phase = u;
        last = u;
        have_last = true;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out[i].at_pole)
            continue;
        std::size_t lo = i, hi = i;
        while (lo > 0 && out[lo].at_pole)
            --lo;
        while (hi + 1 < out.size() && out[hi].at_pole)
            ++hi;
        const bool lo_ok = !out[lo].at_pole, hi_ok = !out[hi].at_pole;
        if (lo_ok && hi_ok) {
            const double t = (out[i].k - out[lo].k) / (out[hi].k - out[lo].k);
            out[i].unwrapped_phase = (1.0 - t) * out[lo].unwrapped_phase + t * out[hi].unwrapped_phase;
        } else if (lo_ok) {
            out[i].unwrapped_phase = out[lo].unwrapped_phase;
        } else if (hi_ok) {
            out[i].unwrapped_phase = out[hi].unwrapped_phase;
        } else {
            out[i].unwrapped_phase = out[i].phase;
        }
    }
    return out;
}

}  // namespace qhybrid
