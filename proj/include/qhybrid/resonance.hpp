#pragma once

// Resonances of H_Θ: zeros of det(Θ − Q^H_z) = (γ − Q^L_z)(α − Q^W_z) − ε² in
// the lower half-plane, one branch r_m(ε) growing out of each λ_m ∈ Σ^+_α.
//
// Sheet convention. Q^W is entire apart from its real poles, so only
// Q^L_z = i/√z carries a cut. A resonance is reached from the physical
// boundary value on (0,∞) by moving down across the cut, so √z is the
// principal root there: Re √z > 0 and Im √z < 0 for Im z < 0 (see
// sqrt_continued). Every routine in this file evaluates Q^L on that sheet
// unless a Sheet argument says otherwise. With this choice the weak-coupling
// coefficient w_m has Im w_m < 0, matching the sign the resonance
// expansion requires.

#include <qhybrid/branch.hpp>
#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/parallel.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/spectra.hpp>
#include <qhybrid/specfun.hpp>

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qhybrid {

enum class Sheet { physical, continued };

enum class ResonanceMethod { perturbative, fixed_point, newton };

inline std::string_view to_string(ResonanceMethod m) {
    switch (m) {
        case ResonanceMethod::perturbative: return "PERTURBATIVE";
        case ResonanceMethod::fixed_point: return "FIXED_POINT";
        case ResonanceMethod::newton: return "NEWTON";
    }
    return "UNKNOWN";
}

struct Resonance {
    std::complex<double> z;
    int m = 0;
    double eps = 0.0;
    ResonanceMethod method = ResonanceMethod::perturbative;
    int iterations = 0;
    /// |det(Θ − Q^H_z)| on the continued sheet.
    double residual = 0.0;
    /// |z_k − z_{k−1}| for each iteration, in order.
    std::vector<double> steps;
};

/// Q^L_z = i/√z on the requested sheet.
inline std::complex<double> q_lead_on(std::complex<double> z, Sheet sheet) {
    if (z == std::complex<double>(0.0, 0.0))
        throw domain_error("q_lead: z = 0");
    const std::complex<double> s = sheet == Sheet::physical ? sqrt_physical(z) : sqrt_continued(z);
    return std::complex<double>(0.0, 1.0) / s;
}

/// dQ^L/dz = −i/(2 z^{3/2}) on the requested sheet.
inline std::complex<double> q_lead_deriv_on(std::complex<double> z, Sheet sheet) {
    const std::complex<double> s = sheet == Sheet::physical ? sqrt_physical(z) : sqrt_continued(z);
    return std::complex<double>(0.0, -0.5) / (z * s);
}

/// (γ − Q^L_z)(α − Q^W_z) − ε².
inline std::complex<double> det_secular(const WedgeGeometry& geom, const CouplingMatrix& th, std::complex<double> z,
                                        Sheet sheet = Sheet::continued, const SeriesControl& ctl = {}) {
    return (th.gamma - q_lead_on(z, sheet)) * (th.alpha - q_wedge(geom, z, ctl)) - th.eps * th.eps;
}

/// det(Θ − Q^H_z) from the matrix form, with Θ₂₂ = α+1 and Q^H₂₂ = Q^W+1.
inline std::complex<double> det_secular_matrix(const WedgeGeometry& geom, const CouplingMatrix& th,
                                               std::complex<double> z, Sheet sheet = Sheet::continued,
                                               const SeriesControl& ctl = {}) {
    const Matrix2c theta(th.theta11(), th.theta12(), th.theta12(), th.theta22());
    const Matrix2c qh = Matrix2c::diagonal(q_lead_on(z, sheet), q_wedge(geom, z, ctl) + 1.0);
    Matrix2c d;
    for (int i = 0; i < 4; ++i)
        d.a[i] = theta.a[i] - qh.a[i];
    return d.det();
}

/// f(z) = α − ε²√z/(γ√z − i), so that resonances solve Q^W_z = f(z).
inline std::complex<double> resonance_rhs(const CouplingMatrix& th, std::complex<double> z) {
    const std::complex<double> s = sqrt_continued(z);
    return th.alpha - th.eps * th.eps * s / (th.gamma * s - std::complex<double>(0.0, 1.0));
}

/// w_m, the ε² coefficient of r_m(ε).
inline std::complex<double> weak_coupling_w(const WedgeGeometry& geom, double alpha, double gamma, int m,
                                            const SeriesControl& ctl = {}) {
    const double lam = nonfriedrichs_eigenvalue(geom, alpha, m, ctl);
    const double rho = gz_norm_sq(geom, lam, ctl);
    const double den = rho * (lam * gamma * gamma + 1.0);
    return {-lam * gamma / den, -std::sqrt(lam) / den};
}

/// λ_m + w_m ε².
inline Resonance resonance_perturbative(const WedgeGeometry& geom, const CouplingMatrix& th, int m,
                                        const SeriesControl& ctl = {}) {
    th.validate();
    Resonance r;
    r.m = m;
    r.eps = th.eps;
    r.method = ResonanceMethod::perturbative;
    r.z = nonfriedrichs_eigenvalue(geom, th.alpha, m, ctl) +
          weak_coupling_w(geom, th.alpha, th.gamma, m, ctl) * (th.eps * th.eps);
    r.residual = std::abs(det_secular(geom, th, r.z, Sheet::continued, ctl));
    return r;
}

enum class FixedPointScheme {
    /// z_k = z_{k−1} + (f(z_{k−1}) − Q^W_{z_{k−1}})/ρ(λ_m). Same first step as
    /// the linearized scheme; its fixed points are exact roots of det = 0.
    chord,
    /// z_k = λ_m + (f(z_{k−1}) − α)/ρ(λ_m), Q^W replaced by its tangent at λ_m.
    /// Converges to a point O(ε⁴) away from the root.
    linearized,
};

struct FixedPointControl {
    double tol = 1e-13;
    int max_iter = 100;
    /// Steps must shrink at least by this ratio from the second step on.
    double max_ratio = 0.5;
    FixedPointScheme scheme = FixedPointScheme::chord;
};

/// Recursive fixed-point iteration started at z_0 = λ_m.
inline Resonance resonance_fixed_point(const WedgeGeometry& geom, const CouplingMatrix& th, int m,
                                       const FixedPointControl& fc = {}, const SeriesControl& ctl = {}) {
    th.validate();
    const double lam = nonfriedrichs_eigenvalue(geom, th.alpha, m, ctl);
    const double rho = gz_norm_sq(geom, lam, ctl);
    Resonance r;
    r.m = m;
    r.eps = th.eps;
    r.method = ResonanceMethod::fixed_point;
    std::complex<double> z = lam;
    for (int k = 1; k <= fc.max_iter; ++k) {
        std::complex<double> next;
        if (fc.scheme == FixedPointScheme::chord)
            next = z + (resonance_rhs(th, z) - q_wedge(geom, z, ctl)) / rho;
        else
            next = lam + (resonance_rhs(th, z) - th.alpha) / rho;
        const double step = std::abs(next - z);
        r.steps.push_back(step);
        z = next;
        r.iterations = k;
        if (step <= fc.tol * std::max(1.0, std::abs(z))) {
            r.z = z;
            r.residual = std::abs(det_secular(geom, th, z, Sheet::continued, ctl));
            return r;
        }
        const std::size_t n = r.steps.size();
        if (n >= 2 && r.steps[n - 1] > fc.max_ratio * r.steps[n - 2])
            throw convergence_error("resonance_fixed_point: contraction ratio " +
                                        std::to_string(r.steps[n - 1] / r.steps[n - 2]) +
                                        " above limit; use resonance_newton",
                                    k);
    }
    throw convergence_error("resonance_fixed_point: max_iter exceeded; use resonance_newton", fc.max_iter);
}

struct NewtonControl {
    double tol = 1e-14;
    int max_iter = 50;
    /// Use complex central differences instead of the analytic derivative.
    bool finite_difference = false;
};

namespace detail {

/// D̃ = J̃_β·D = (γ − Q^L)(α J̃_β + J̃_{−β}) − ε² J̃_β and its derivative. D̃ has
/// the zeros of D but no poles at the λ²_{m,β}.
struct regular_det {
    std::complex<double> value;
    std::complex<double> deriv;
};

inline regular_det regularized_det(const WedgeGeometry& geom, const CouplingMatrix& th, std::complex<double> z,
                                   bool finite_difference, const SeriesControl& ctl) {
    const double b = geom.beta();
    auto value = [&](std::complex<double> x) {
        const std::complex<double> jp = tilde_j(b, x, ctl);
        const std::complex<double> jm = tilde_j(-b, x, ctl);
        return (th.gamma - q_lead_on(x, Sheet::continued)) * (th.alpha * jp + jm) - th.eps * th.eps * jp;
    };
    regular_det out;
    out.value = value(z);
    if (finite_difference) {
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        out.deriv = (value(z + h) - value(z - h)) / (2.0 * h);
        return out;
    }
    const auto p = detail::tilde_j_series<wide_real>(b, z, ctl, true, false);
    const auto q = detail::tilde_j_series<wide_real>(-b, z, ctl, true, false);
    const std::complex<double> jp = p.value.to_complex();
    const std::complex<double> jm = q.value.to_complex();
    const std::complex<double> djp = p.derivative.to_complex();
    const std::complex<double> djm = q.derivative.to_complex();
    const std::complex<double> lead = th.gamma - q_lead_on(z, Sheet::continued);
    out.deriv = -q_lead_deriv_on(z, Sheet::continued) * (th.alpha * jp + jm) + lead * (th.alpha * djp + djm) -
                th.eps * th.eps * djp;
    return out;
}

}  // namespace detail

/// Newton's method on the secular equation from z0.
inline Resonance resonance_newton(const WedgeGeometry& geom, const CouplingMatrix& th, std::complex<double> z0,
                                  const NewtonControl& nc = {}, const SeriesControl& ctl = {}) {
    th.validate();
    Resonance r;
    r.eps = th.eps;
    r.method = ResonanceMethod::newton;
    std::complex<double> z = z0;
    for (int k = 1; k <= nc.max_iter; ++k) {
        if (!(std::abs(z) <= ctl.domain_radius) || z == std::complex<double>(0.0, 0.0))
            throw convergence_error("resonance_newton: iterate left the series window", k);
        const auto d = detail::regularized_det(geom, th, z, nc.finite_difference, ctl);
        if (d.value == std::complex<double>(0.0, 0.0)) {
            r.iterations = k - 1;
            break;
        }
        if (!(std::abs(d.deriv) > 0.0) || !std::isfinite(std::abs(d.deriv)))
            throw convergence_error("resonance_newton: derivative vanished", k);
        const std::complex<double> step = d.value / d.deriv;
        z -= step;
        r.steps.push_back(std::abs(step));
        r.iterations = k;
        if (std::abs(step) <= nc.tol * std::max(1.0, std::abs(z)))
            break;
        if (k == nc.max_iter)
            throw convergence_error("resonance_newton: max_iter exceeded", k);
    }
    r.z = z;
    r.residual = std::abs(det_secular(geom, th, z, Sheet::continued, ctl));
    return r;
}

struct SweepRow {
    double param = 0.0;
    std::complex<double> z;
    ResonanceMethod method = ResonanceMethod::newton;
    double residual = 0.0;
    /// Set when this row failed; z and residual are then NaN.
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Index of the first grid point at which the track was lost.
    std::optional<std::size_t> lost_at;
    std::string warning;
};

namespace detail {

inline void check_grid(const std::vector<double>& grid, const char* what) {
    if (grid.empty())
        throw domain_error(std::string(what) + ": empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw domain_error(std::string(what) + ": grid must be strictly increasing");
}

/// Newton from the given seeds in order; the first root within `radius` of
/// `anchor` is accepted.
inline std::optional<Resonance> newton_from_seeds(const WedgeGeometry& geom, const CouplingMatrix& th,
                                                  const std::vector<std::complex<double>>& seeds,
                                                  std::complex<double> anchor, double radius,
                                                  const SeriesControl& ctl) {
    for (const auto& s : seeds) {
        try {
            auto r = resonance_newton(geom, th, s, {}, ctl);
            if (std::abs(r.z - anchor) <= radius && r.z.imag() <= 0.0)
                return r;
        } catch (const error&) {
        }
    }
    return std::nullopt;
}

/// Continuation of r_m in ε from the given start to eps_target, with
/// secant prediction in ε². Used when the fixed point is not contracting.
inline Resonance continue_in_eps(const WedgeGeometry& geom, const CouplingMatrix& th, int m,
                                 const SeriesControl& ctl) {
    const double lam = nonfriedrichs_eigenvalue(geom, th.alpha, m, ctl);
    const std::complex<double> w = weak_coupling_w(geom, th.alpha, th.gamma, m, ctl);
    double eps = std::min(th.eps, 0.05);
    CouplingMatrix c(th.alpha, th.gamma, eps);
    auto first = newton_from_seeds(geom, c, {lam + w * eps * eps}, lam, 1.0, ctl);
    if (!first)
        throw convergence_error("continuation: no root near lambda_m at small eps", 0);
    std::complex<double> prev_z = lam;
    double prev_e2 = 0.0;
    std::complex<double> z = first->z;
    double e2 = eps * eps;
    int total = first->iterations;
    double h = 0.02;
    while (eps < th.eps) {
        const double next_eps = std::min(th.eps, eps + h);
        const double ne2 = next_eps * next_eps;
        const std::complex<double> slope = (z - prev_z) / (e2 - prev_e2);
        c = CouplingMatrix(th.alpha, th.gamma, next_eps);
        const std::complex<double> pred = z + slope * (ne2 - e2);
        const double radius = 10.0 * std::abs(pred - z) + 1e-8;
        auto r = newton_from_seeds(geom, c, {pred, z}, pred, radius, ctl);
        if (!r) {
            h *= 0.5;
            if (h < 1e-6)
                throw convergence_error("continuation: lost the resonance track", total);
            continue;
        }
        total += r->iterations;
        prev_z = z;
        prev_e2 = e2;
        z = r->z;
        e2 = ne2;
        eps = next_eps;
        h = std::min(0.05, h * 1.5);
    }
    Resonance out = resonance_newton(geom, th, z, {}, ctl);
    out.m = m;
    out.iterations += total;
    return out;
}

}  // namespace detail

/// r_m at the given ε: fixed point polished by Newton, or continuation in ε
/// from weak coupling when the fixed point does not contract.
inline Resonance locate_resonance(const WedgeGeometry& geom, const CouplingMatrix& th, int m,
                                  const SeriesControl& ctl = {}) {
    th.validate();
    if (th.eps == 0.0) {
        Resonance r;
        r.z = nonfriedrichs_eigenvalue(geom, th.alpha, m, ctl);
        r.m = m;
        r.method = ResonanceMethod::fixed_point;
        r.residual = std::abs(det_secular(geom, th, r.z, Sheet::continued, ctl));
        return r;
    }
    try {
        const Resonance fp = resonance_fixed_point(geom, th, m, {}, ctl);
        Resonance r = resonance_newton(geom, th, fp.z, {}, ctl);
        r.m = m;
        r.iterations += fp.iterations;
        return r;
    } catch (const convergence_error&) {
    } catch (const pole_error&) {
    }
    return detail::continue_in_eps(geom, th, m, ctl);
}

/// Track r_m along an ascending ε grid.
///
/// The first nonzero ε is solved by fixed point + Newton. Each later point is
/// Newton seeded at the previous root plus w_m·Δ(ε²); if that seed fails, a
/// secant prediction in ε² and the previous root itself are tried. A root is
/// accepted only within 10|w_m||Δ(ε²)| + 1e−8 of the previous one (the
/// continuity bound), otherwise ε is bisected internally. A lost track ends
/// the sweep with lost_at set.
inline SweepResult sweep_eps(const WedgeGeometry& geom, double alpha, double gamma, int m,
                             const std::vector<double>& eps_grid, const SeriesControl& ctl = {}) {
    detail::check_grid(eps_grid, "sweep_eps");
    if (eps_grid.front() < 0.0)
        throw domain_error("sweep_eps: eps must be non-negative");
    const double lam = nonfriedrichs_eigenvalue(geom, alpha, m, ctl);
    const std::complex<double> w = weak_coupling_w(geom, alpha, gamma, m, ctl);
    SweepResult out;

    std::complex<double> z_prev = lam, z_prev2 = lam;
    double e2_prev = 0.0, e2_prev2 = 0.0;
    bool have_secant = false;

    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double eps = eps_grid[i];
        const CouplingMatrix th(alpha, gamma, eps);
        SweepRow row;
        row.param = eps;
        try {
            Resonance r;
            if (i == 0) {
                r = locate_resonance(geom, th, m, ctl);
            } else {
                // Advance from the previous root to eps, halving the step on failure.
                double e_from = eps_grid[i - 1];
                int total = 0;
                while (true) {
                    double e_to = eps;
                    std::optional<Resonance> got;
                    for (int halvings = 0; halvings < 20; ++halvings) {
                        const double e2 = e_to * e_to;
                        const double de2 = e2 - e2_prev;
                        std::vector<std::complex<double>> seeds{z_prev + w * de2};
                        if (have_secant)
                            seeds.push_back(z_prev + (z_prev - z_prev2) / (e2_prev - e2_prev2) * de2);
                        seeds.push_back(z_prev);
                        const double radius = 10.0 * std::abs(w) * std::abs(de2) + 1e-8;
                        got = detail::newton_from_seeds(geom, CouplingMatrix(alpha, gamma, e_to), seeds, z_prev,
                                                        radius, ctl);
                        if (got)
                            break;
                        e_to = 0.5 * (e_from + e_to);
                    }
                    if (!got)
                        throw convergence_error("sweep_eps: lost the resonance track", total);
                    total += got->iterations;
                    z_prev2 = z_prev;
                    e2_prev2 = e2_prev;
                    z_prev = got->z;
                    e2_prev = e_to * e_to;
                    have_secant = true;
                    e_from = e_to;
                    if (e_to == eps) {
                        r = *got;
                        r.iterations = total;
                        break;
                    }
                }
            }
            if (i == 0) {
                z_prev2 = z_prev;
                e2_prev2 = e2_prev;
                have_secant = eps > 0.0;
                z_prev = r.z;
                e2_prev = eps * eps;
            }
            row.z = r.z;
            row.method = r.method;
            row.residual = r.residual;
        } catch (const error& e) {
            out.lost_at = i;
            out.warning = std::string("track lost at eps=") + std::to_string(eps) + ": " + e.what();
            break;
        }
        out.rows.push_back(row);
    }
    return out;
}

/// r_m at fixed (α, γ, ε) for each β of an ascending grid in [1/2, 1).
/// Points are independent and computed with up to `threads` workers; a
/// failing β yields a row with the error text and NaN values.
inline SweepResult sweep_beta(double alpha, double gamma, double eps, int m, const std::vector<double>& beta_grid,
                              unsigned threads = 1, const SeriesControl& ctl = {}) {
    detail::check_grid(beta_grid, "sweep_beta");
    for (double b : beta_grid)
        WedgeGeometry{b};
    const CouplingMatrix th(alpha, gamma, eps);
    SweepResult out;
    out.rows.resize(beta_grid.size());
    parallel_for(beta_grid.size(), threads, [&](std::size_t i) {
        SweepRow& row = out.rows[i];
        row.param = beta_grid[i];
        try {
            const Resonance r = locate_resonance(WedgeGeometry(beta_grid[i]), th, m, ctl);
            row.z = r.z;
            row.method = r.method;
            row.residual = r.residual;
        } catch (const error& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.z = {nan, nan};
            row.residual = nan;
            row.error = e.what();
        }
    });
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (!out.rows[i].error.empty()) {
            if (!out.lost_at)
                out.lost_at = i;
            out.warning += "beta=" + std::to_string(out.rows[i].param) + ": " + out.rows[i].error + "\n";
        }
    }
    return out;
}

}  // namespace qhybrid
