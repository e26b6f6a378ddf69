#pragma once

// Real spectrum of the wedge extensions and of the hybrid Hamiltonian.
//
// Friedrichs eigenvalues are λ²_{m,nβ} with eigenfunctions ψ_{m,n}. Only the
// n = 1 modes have a non-zero vertex trace, so the n > 1 eigenvalues (Σ_F)
// survive in every extension and in the hybrid. The remaining wedge
// eigenvalues are the level set Q^W_λ = α: one root below λ²_{1,β} and one
// root λ_m in each gap (λ²_{m,β}, λ²_{m+1,β}). The hybrid discrete spectrum
// is {λ < 0 : (γ − Q^L_λ)(α − Q^W_λ) = ε²}.

#include <qhybrid/errors.hpp>
#include <qhybrid/geometry.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/roots.hpp>
#include <qhybrid/specfun.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qhybrid {

enum class SpectralTag {
    friedrichs_embedded,  ///< λ²_{m,nβ}, n > 1
    nonfriedrichs_pos,    ///< Q^W_λ = α, λ ≥ 0
    nonfriedrichs_neg,    ///< Q^W_λ = α, λ < 0
    lead_bound,           ///< −γ^{−2} of the decoupled lead
    hybrid_bound,         ///< negative root of the hybrid secular equation
};

inline std::string_view to_string(SpectralTag t) {
    switch (t) {
        case SpectralTag::friedrichs_embedded: return "FRIEDRICHS_EMBEDDED";
        case SpectralTag::nonfriedrichs_pos: return "NONFRIEDRICHS_POS";
        case SpectralTag::nonfriedrichs_neg: return "NONFRIEDRICHS_NEG";
        case SpectralTag::lead_bound: return "LEAD_BOUND";
        case SpectralTag::hybrid_bound: return "HYBRID_BOUND";
    }
    return "UNKNOWN";
}

struct SpectralPoint {
    double lambda = 0.0;
    SpectralTag tag = SpectralTag::hybrid_bound;
    int m = 0;  ///< radial index, or gap index of λ_m; 0 when not applicable
    int n = 0;  ///< angular index for Friedrichs modes; 0 when not applicable
    /// Residual of the defining equation at lambda.
    double residual = 0.0;
    /// Set for the α = −1 singleton, which is exactly 0.
    bool exact_zero = false;
};

struct FriedrichsEigenvalue {
    double lambda;  ///< λ²_{m,nβ}
    int m;
    int n;
    double zero;  ///< λ_{m,nβ}
};

/// Default energy ceiling min(350, λ²_{6,β}).
inline double default_emax(const WedgeGeometry& geom, const SeriesControl& ctl = {}) {
    const auto zeros = bessel_zeros(geom.beta(), ctl);
    double e = 350.0;
    if (zeros.size() >= 6)
        e = std::min(e, zeros[5] * zeros[5]);
    return e;
}

namespace detail {
inline void check_emax(double e_max, const SeriesControl& ctl) {
    if (!(e_max <= ctl.domain_radius))
        throw range_error("E_max = " + std::to_string(e_max) + " exceeds the series window " +
                          std::to_string(ctl.domain_radius));
}
}  // namespace detail

/// All λ²_{m,nβ} ≤ E_max, ascending.
inline std::vector<FriedrichsEigenvalue> friedrichs_eigenvalues(const WedgeGeometry& geom, double e_max,
                                                                const SeriesControl& ctl = {}) {
    detail::check_emax(e_max, ctl);
    std::vector<FriedrichsEigenvalue> out;
    for (int n = 1;; ++n) {
        const double nu = n * geom.beta();
        // j_{ν,1} > ν, so no higher order can contribute once ν² > E_max.
        if (nu * nu > e_max)
            break;
        const auto zeros = bessel_zeros(nu, ctl);
        if (zeros.empty() || zeros.front() * zeros.front() > e_max)
            continue;
        for (std::size_t k = 0; k < zeros.size(); ++k) {
            const double lam = zeros[k] * zeros[k];
            if (lam > e_max)
                break;
            out.push_back({lam, static_cast<int>(k + 1), n, zeros[k]});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return out;
}

/// ψ_{m,n}(r,θ) = 2√(β/π) J_{nβ}(λ_{m,nβ} r)/J_{nβ+1}(λ_{m,nβ}) sin nβθ.
inline double eigenfunction_psi(const WedgeGeometry& geom, int m, int n, const WedgePoint& p,
                                const SeriesControl& ctl = {}) {
    if (m < 1 || n < 1)
        throw domain_error("eigenfunction_psi: indices must be positive");
    p.validate(geom);
    const double nu = n * geom.beta();
    const double lam = bessel_zero(nu, m, ctl);
    const double num = bessel_j(nu, lam * p.r, ctl);
    const double den = bessel_j(nu + 1.0, lam, ctl);
    return 2.0 * std::sqrt(geom.beta() / std::numbers::pi) * num / den * std::sin(nu * p.theta);
}

/// Σ_F ∩ [0, E_max]: the Friedrichs eigenvalues with n > 1.
inline std::vector<SpectralPoint> sigma_F(const WedgeGeometry& geom, double e_max, const SeriesControl& ctl = {}) {
    std::vector<SpectralPoint> out;
    for (const auto& e : friedrichs_eigenvalues(geom, e_max, ctl)) {
        if (e.n < 2)
            continue;
        SpectralPoint p;
        p.lambda = e.lambda;
        p.tag = SpectralTag::friedrichs_embedded;
        p.m = e.m;
        p.n = e.n;
        p.residual = std::abs(bessel_j(e.n * geom.beta(), e.zero, ctl));
        out.push_back(p);
    }
    return out;
}

struct AlphaSpectrum {
    /// Σ^−_α: the singleton root when it is negative (α < −1).
    std::vector<SpectralPoint> negative;
    /// Σ°_α: the singleton root when it is non-negative (α ≥ −1).
    std::vector<SpectralPoint> singleton_nonneg;
    /// λ_m ∈ (λ²_{m,β}, λ²_{m+1,β}), m = 1, 2, … up to E_max.
    std::vector<SpectralPoint> interlaced;

    /// Every root, ascending.
    std::vector<SpectralPoint> all() const {
        std::vector<SpectralPoint> out = negative;
        out.insert(out.end(), singleton_nonneg.begin(), singleton_nonneg.end());
        out.insert(out.end(), interlaced.begin(), interlaced.end());
        return out;
    }
};

namespace detail {

/// Root of Q^W = α on one monotone branch (lo, hi), Q increasing from −∞ to +∞.
/// lo_is_pole / hi_is_pole say whether an end is a pole or a plain bound.
inline std::optional<double> solve_branch(const WedgeGeometry& geom, double alpha, double lo, bool lo_is_pole,
                                          double hi, bool hi_is_pole, const SeriesControl& ctl) {
    auto h = [&](double x) { return q_wedge(geom, x, ctl) - alpha; };
    const double gap = hi - lo;
    double a = lo;
    if (lo_is_pole) {
        bool ok = false;
        for (double d = 0.25 * gap; d > 1e-12 * std::max(1.0, std::abs(lo)); d *= 0.5) {
            if (h(lo + d) < 0.0) {
                a = lo + d;
                ok = true;
                break;
            }
        }
        if (!ok)
            throw error("sigma_alpha: failed to bracket from the left pole");
    } else if (!(h(a) < 0.0)) {
        return std::nullopt;  // root below the series window
    }
    double b = hi;
    if (hi_is_pole) {
        bool ok = false;
        for (double d = 0.25 * gap; d > 1e-12 * std::max(1.0, std::abs(hi)); d *= 0.5) {
            if (h(hi - d) > 0.0) {
                b = hi - d;
                ok = true;
                break;
            }
        }
        if (!ok)
            throw error("sigma_alpha: failed to bracket from the right pole");
    } else if (!(h(b) > 0.0)) {
        return std::nullopt;  // root above the series window
    }
    return bracketed_root(h, [&](double x) { return q_wedge_deriv(geom, x, ctl); }, a, b, 1e-14);
}

inline SpectralPoint alpha_point(const WedgeGeometry& geom, double alpha, double lam, int m,
                                 const SeriesControl& ctl) {
    SpectralPoint p;
    p.lambda = lam;
    p.tag = lam < 0.0 ? SpectralTag::nonfriedrichs_neg : SpectralTag::nonfriedrichs_pos;
    p.m = m;
    p.residual = std::abs(q_wedge(geom, lam, ctl) - alpha);
    return p;
}

}  // namespace detail

/// Solutions of Q^W_λ = α up to E_max.
inline AlphaSpectrum sigma_alpha(const WedgeGeometry& geom, double alpha, double e_max,
                                 const SeriesControl& ctl = {}) {
    if (!std::isfinite(alpha))
        throw domain_error("sigma_alpha: alpha must be finite");
    detail::check_emax(e_max, ctl);
    const auto zeros = bessel_zeros(geom.beta(), ctl);
    if (zeros.empty())
        throw range_error("sigma_alpha: no Friedrichs pole inside the series window");
    AlphaSpectrum out;

    // Singleton below λ²_{1,β}.
    if (alpha == -1.0) {
        SpectralPoint p;
        p.lambda = 0.0;
        p.tag = SpectralTag::nonfriedrichs_pos;
        p.exact_zero = true;
        p.residual = std::abs(q_wedge(geom, 0.0, ctl) - alpha);
        out.singleton_nonneg.push_back(p);
    } else {
        const double first_pole = zeros[0] * zeros[0];
        auto root = detail::solve_branch(geom, alpha, -ctl.domain_radius, false, first_pole, true, ctl);
        if (!root)
            throw range_error("sigma_alpha: singleton root lies below -domain_radius");
        if (*root <= e_max) {
            auto p = detail::alpha_point(geom, alpha, *root, 0, ctl);
            (*root < 0.0 ? out.negative : out.singleton_nonneg).push_back(p);
        }
    }

    for (std::size_t m = 1; m <= zeros.size(); ++m) {
        const double lo = zeros[m - 1] * zeros[m - 1];
        if (lo >= e_max)
            break;
        const bool has_next = m < zeros.size();
        const double hi = has_next ? zeros[m] * zeros[m] : ctl.domain_radius;
        auto root = detail::solve_branch(geom, alpha, lo, true, hi, has_next, ctl);
        if (!root || *root > e_max)
            break;
        out.interlaced.push_back(detail::alpha_point(geom, alpha, *root, static_cast<int>(m), ctl));
    }
    return out;
}

/// λ_m ∈ (λ²_{m,β}, λ²_{m+1,β}) with Q^W_{λ_m} = α.
inline double nonfriedrichs_eigenvalue(const WedgeGeometry& geom, double alpha, int m,
                                       const SeriesControl& ctl = {}) {
    if (m < 1)
        throw domain_error("nonfriedrichs_eigenvalue: m must be positive");
    const auto zeros = bessel_zeros(geom.beta(), ctl);
    if (static_cast<std::size_t>(m) > zeros.size())
        throw range_error("nonfriedrichs_eigenvalue: gap " + std::to_string(m) + " outside the series window");
    const double lo = zeros[m - 1] * zeros[m - 1];
    const bool has_next = static_cast<std::size_t>(m) < zeros.size();
    const double hi = has_next ? zeros[m] * zeros[m] : ctl.domain_radius;
    auto root = detail::solve_branch(geom, alpha, lo, true, hi, has_next, ctl);
    if (!root)
        throw range_error("nonfriedrichs_eigenvalue: lambda_m lies beyond the series window");
    return *root;
}

/// −γ^{−2} when the point interaction a = −1/γ is attractive (γ > 0).
inline std::optional<SpectralPoint> lead_bound_state(double gamma) {
    if (!std::isfinite(gamma))
        throw domain_error("lead_bound_state: gamma must be finite");
    if (!(gamma > 0.0))
        return std::nullopt;
    SpectralPoint p;
    p.lambda = -1.0 / (gamma * gamma);
    p.tag = SpectralTag::lead_bound;
    p.residual = std::abs(gamma - q_lead(p.lambda).real());
    return p;
}

struct DiscreteScanControl {
    int panels = 1000;
    /// Extra geometric points −h·2^{−k} resolving the singular end at 0⁻.
    int tail_points = 60;
};

namespace detail {

/// Sign-change roots of a real function on [λ_min, 0).
template <class F, class DF>
std::vector<double> scan_negative_axis(F&& f, DF&& df, double lambda_min, const DiscreteScanControl& sc) {
    std::vector<double> grid;
    const double h = -lambda_min / sc.panels;
    for (int i = 0; i < sc.panels; ++i)
        grid.push_back(lambda_min + i * h);
    for (int k = 0; k <= sc.tail_points; ++k)
        grid.push_back(-h * std::ldexp(1.0, -k));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> roots;
    double x_prev = grid[0];
    double f_prev = f(x_prev);
    if (f_prev == 0.0)
        roots.push_back(x_prev);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && (fx < 0.0) != (f_prev < 0.0)) {
            roots.push_back(bracketed_root(f, df, x_prev, x, 1e-14));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace detail

/// Secular function on the negative axis, (γ − |λ|^{−1/2})(α − Q^W_λ) − ε².
inline double hybrid_secular_negative(const WedgeGeometry& geom, const CouplingMatrix& th, double lambda,
                                      const SeriesControl& ctl = {}) {
    const double lead = th.gamma - 1.0 / std::sqrt(-lambda);
    return lead * (th.alpha - q_wedge(geom, lambda, ctl)) - th.eps * th.eps;
}

/// σ_d(H_Θ) ∩ [λ_min, 0).
///
/// Dense sign scan followed by bisection and a Newton polish. At ε = 0 the
/// two factors are scanned separately so a common root of both (a double
/// root of the product) is not lost.
inline std::vector<SpectralPoint> hybrid_discrete_spectrum(const WedgeGeometry& geom, const CouplingMatrix& th,
                                                           double lambda_min = -100.0,
                                                           const DiscreteScanControl& sc = {},
                                                           const SeriesControl& ctl = {}) {
    th.validate();
    if (!(lambda_min < 0.0) || !std::isfinite(lambda_min))
        throw domain_error("hybrid_discrete_spectrum: lambda_min must be finite and negative");
    if (-lambda_min > ctl.domain_radius)
        throw range_error("hybrid_discrete_spectrum: lambda_min outside the series window");

    auto lead = [&](double x) { return th.gamma - 1.0 / std::sqrt(-x); };
    auto dlead = [&](double x) { return -0.5 * std::pow(-x, -1.5); };
    auto wedge = [&](double x) { return th.alpha - q_wedge(geom, x, ctl); };
    auto dwedge = [&](double x) { return -q_wedge_deriv(geom, x, ctl); };

    std::vector<double> roots;
    if (th.eps == 0.0) {
        roots = detail::scan_negative_axis(lead, dlead, lambda_min, sc);
        auto w = detail::scan_negative_axis(wedge, dwedge, lambda_min, sc);
        roots.insert(roots.end(), w.begin(), w.end());
    } else {
        auto f = [&](double x) { return hybrid_secular_negative(geom, th, x, ctl); };
        auto df = [&](double x) { return dlead(x) * wedge(x) + lead(x) * dwedge(x); };
        roots = detail::scan_negative_axis(f, df, lambda_min, sc);
    }
    std::sort(roots.begin(), roots.end());

    std::vector<SpectralPoint> out;
    for (double x : roots) {
        SpectralPoint p;
        p.lambda = x;
        p.tag = SpectralTag::hybrid_bound;
        const double scale = std::abs(lead(x) * wedge(x)) + th.eps * th.eps;
        p.residual = std::abs(hybrid_secular_negative(geom, th, x, ctl)) / std::max(1.0, scale);
        out.push_back(p);
    }
    return out;
}

struct Interval {
    double lo;
    double hi;  ///< +∞ for half-lines
};

struct SpectrumReport {
    WedgeGeometry geometry{0.5};
    CouplingMatrix coupling;
    double e_max = 0.0;
    double lambda_min = 0.0;
    Interval essential{0.0, std::numeric_limits<double>::infinity()};
    Interval absolutely_continuous{0.0, std::numeric_limits<double>::infinity()};
    /// Continuous spectrum is [0,∞) minus these points (Σ_F up to E_max).
    std::vector<double> continuous_excluded;
    std::vector<SpectralPoint> discrete;
    std::vector<SpectralPoint> point;
    /// 0 never belongs to the point spectrum; recorded as a consistency flag.
    bool zero_in_point_spectrum = false;
};

/// Spectral classification of H_Θ.
///
/// For ε > 0: discrete = hybrid roots, point = discrete ∪ Σ_F. At ε = 0 the
/// operator decouples into −L_γ ⊕ −Δ^α_W, so the discrete roots are retagged
/// LEAD_BOUND / NONFRIEDRICHS_NEG and the embedded non-Friedrichs
/// eigenvalues Σ^+_α join the point spectrum.
inline SpectrumReport classify_spectrum(const WedgeGeometry& geom, const CouplingMatrix& th, double e_max,
                                        double lambda_min = -100.0, const SeriesControl& ctl = {}) {
    SpectrumReport rep;
    rep.geometry = geom;
    rep.coupling = th;
    rep.e_max = e_max;
    rep.lambda_min = lambda_min;
    rep.discrete = hybrid_discrete_spectrum(geom, th, lambda_min, {}, ctl);
    const auto sf = sigma_F(geom, e_max, ctl);

    if (th.eps == 0.0) {
        for (auto& p : rep.discrete) {
            const double lead = th.gamma - 1.0 / std::sqrt(-p.lambda);
            const double wedge = th.alpha - q_wedge(geom, p.lambda, ctl);
            p.tag = std::abs(lead) <= std::abs(wedge) ? SpectralTag::lead_bound : SpectralTag::nonfriedrichs_neg;
        }
        const auto sa = sigma_alpha(geom, th.alpha, e_max, ctl);
        rep.point = rep.discrete;
        rep.point.insert(rep.point.end(), sa.singleton_nonneg.begin(), sa.singleton_nonneg.end());
        rep.point.insert(rep.point.end(), sa.interlaced.begin(), sa.interlaced.end());
    } else {
        rep.point = rep.discrete;
    }
    rep.point.insert(rep.point.end(), sf.begin(), sf.end());
    std::stable_sort(rep.point.begin(), rep.point.end(),
                     [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    for (const auto& p : sf)
        rep.continuous_excluded.push_back(p.lambda);
    rep.zero_in_point_spectrum =
        std::any_of(rep.point.begin(), rep.point.end(), [&](const SpectralPoint& p) {
            return p.lambda == 0.0 && th.eps != 0.0;
        });
    return rep;
}

}  // namespace qhybrid
