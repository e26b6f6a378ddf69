#pragma once

// Special-function kernel built on the entire series
//
//   J̃_ν(z) = 1 + Σ_{k≥1} (−1)^k (z/4)^k / (k! (k+ν)!),   (k+ν)! = (1+ν)⋯(k+ν),
//
// from which J_ν(w) = (w/2)^ν J̃_ν(w²)/Γ(1+ν) and I_ν(x) = (x/2)^ν J̃_ν(−x²)/Γ(1+ν).
// No asymptotic expansions are used; callers must stay inside
// |z| ≤ SeriesControl::domain_radius.

#include <qhybrid/errors.hpp>
#include <qhybrid/wide.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace qhybrid {

struct SeriesControl {
    double rel_tol = 1e-15;
    int max_terms = 200;
    /// Largest |z| (squared-argument variable) accepted by the series.
    double domain_radius = 400.0;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw domain_error("SeriesControl: rel_tol must lie in (0, 1)");
        if (max_terms < 10)
            throw domain_error("SeriesControl: max_terms must be at least 10");
        if (!(domain_radius > 0.0))
            throw domain_error("SeriesControl: domain_radius must be positive");
    }
};

/// Throws unless ν > −1 (orders used here are ±β, nβ and nβ+1).
inline void check_bessel_order(double nu) {
    if (!std::isfinite(nu) || nu <= -1.0)
        throw domain_error("Bessel order must satisfy nu > -1, got " + std::to_string(nu));
}

/// Γ(−β)/Γ(β) for β ∈ [1/2, 1).
///
/// Evaluated as −Γ(1−β)/Γ(1+β), which avoids the gamma function at a
/// negative argument; both forms agree by Γ(x+1) = xΓ(x).
inline double gamma_ratio(double beta) {
    if (!(beta >= 0.5 && beta < 1.0))
        throw domain_error("gamma_ratio: beta must lie in [1/2, 1)");
    return -std::tgamma(1.0 - beta) / std::tgamma(1.0 + beta);
}

namespace detail {

template <class R>
struct series_value {
    basic_complex<R> value;       // J̃_ν(z), or J̃_ν(z) − 1 when the leading 1 is skipped
    basic_complex<R> derivative;  // dJ̃_ν/dz
    int terms = 0;
};

/// Sums the J̃_ν series and optionally its term-wise derivative in precision R.
///
/// Terms follow t_k = t_{k−1} · (−z/4) / (k (k+ν)), so the generalized
/// factorial is a running product. Summation stops once terms are past
/// their peak and below rel_tol·|sum|, or below the rounding floor of R
/// relative to the largest term seen (a zero of J̃ never satisfies the
/// relative test).
///
/// Any order that is not a negative integer is accepted here; the public
/// entry points restrict to ν > −1.
template <class R>
series_value<R> tilde_j_series_any_order(double nu, std::complex<double> z, const SeriesControl& ctl,
                                         bool want_derivative, bool skip_leading_one) {
    ctl.validate();
    if (nu < 0.0 && nu == std::floor(nu))
        throw domain_error("J~ series: order is a negative integer");
    if (!(std::abs(z) <= ctl.domain_radius))
        throw range_error("J~ series: |z| = " + std::to_string(std::abs(z)) +
                          " exceeds domain radius " + std::to_string(ctl.domain_radius));

    const double floor_eps = std::is_same_v<R, double> ? std::numeric_limits<double>::epsilon()
                                                       : wide_epsilon();
    const basic_complex<R> step{static_cast<R>(-z.real() / 4.0), static_cast<R>(-z.imag() / 4.0)};
    const R nu_w = static_cast<R>(nu);
    const double zq = std::abs(z) / 4.0;

    series_value<R> out;
    basic_complex<R> term{R(1), R(0)};
    basic_complex<R> sum = skip_leading_one ? basic_complex<R>{} : basic_complex<R>{R(1), R(0)};
    // d_k = k c_k z^{k−1}; d_1 = −1/(4(1+ν)), d_k = d_{k−1}·(−z/4)/((k−1)(k+ν)).
    basic_complex<R> dterm{};
    basic_complex<R> dsum{};
    double max_term = 1.0;
    double max_dterm = 0.0;

    if (z == std::complex<double>(0.0, 0.0)) {
        out.value = sum;
        out.derivative = basic_complex<R>{static_cast<R>(-1.0 / (4.0 * (1.0 + nu))), R(0)};
        out.terms = 1;
        return out;
    }

    for (int k = 1; k <= ctl.max_terms; ++k) {
        const R kw = static_cast<R>(k);
        const R denom = kw * (kw + nu_w);
        term *= step;
        term *= R(1) / denom;
        sum += term;

        if (want_derivative) {
            if (k == 1) {
                dterm = basic_complex<R>{R(-1) / (R(4) * (R(1) + nu_w)), R(0)};
            } else {
                dterm *= step;
                dterm *= R(1) / ((kw - R(1)) * (kw + nu_w));
            }
            dsum += dterm;
            max_dterm = std::max(max_dterm, l1_norm(dterm));
        }

        const double tmag = l1_norm(term);
        max_term = std::max(max_term, tmag);
        const bool decreasing = k + 1 + nu > 0.0 && zq < static_cast<double>(k + 1) * (k + 1 + nu);
        if (!decreasing)
            continue;

        const double smag = l1_norm(sum);
        bool done = tmag <= ctl.rel_tol * 0.01 * smag || tmag <= floor_eps * max_term;
        if (done && want_derivative) {
            const double dmag = l1_norm(dterm);
            done = dmag <= ctl.rel_tol * 0.01 * l1_norm(dsum) || dmag <= floor_eps * max_dterm;
        }
        if (done) {
            out.value = sum;
            out.derivative = dsum;
            out.terms = k;
            return out;
        }
    }
    throw accuracy_error("J~ series did not converge within max_terms", l1_norm(term));
}

template <class R>
series_value<R> tilde_j_series(double nu, std::complex<double> z, const SeriesControl& ctl,
                               bool want_derivative, bool skip_leading_one) {
    check_bessel_order(nu);
    return tilde_j_series_any_order<R>(nu, z, ctl, want_derivative, skip_leading_one);
}

}  // namespace detail

/// J̃_ν(z), summed in extended precision.
inline std::complex<double> tilde_j(double nu, std::complex<double> z, const SeriesControl& ctl = {}) {
    return detail::tilde_j_series<wide_real>(nu, z, ctl, false, false).value.to_complex();
}

/// dJ̃_ν/dz by term-wise differentiation.
inline std::complex<double> tilde_j_deriv(double nu, std::complex<double> z,
                                          const SeriesControl& ctl = {}) {
    return detail::tilde_j_series<wide_real>(nu, z, ctl, true, false).derivative.to_complex();
}

/// J_ν(w) = (w/2)^ν J̃_ν(w²)/Γ(1+ν) with the principal power.
inline std::complex<double> bessel_j(double nu, std::complex<double> w, const SeriesControl& ctl = {}) {
    check_bessel_order(nu);
    if (w == std::complex<double>(0.0, 0.0)) {
        if (nu > 0.0)
            return 0.0;
        if (nu == 0.0)
            return 1.0;
        throw domain_error("bessel_j: J_nu(0) is singular for nu < 0");
    }
    const std::complex<double> prefactor =
        (nu == 0.0) ? std::complex<double>(1.0) : std::pow(w / 2.0, nu);
    return prefactor * tilde_j(nu, w * w, ctl) / std::tgamma(1.0 + nu);
}

/// Real-argument J_ν(x) for x ≥ 0.
inline double bessel_j(double nu, double x, const SeriesControl& ctl = {}) {
    if (x < 0.0)
        throw domain_error("bessel_j: real overload requires x >= 0");
    return bessel_j(nu, std::complex<double>(x, 0.0), ctl).real();
}

/// I_ν(x) = (x/2)^ν J̃_ν(−x²)/Γ(1+ν) for x > 0; every series term is positive.
inline double bessel_i(double nu, double x, const SeriesControl& ctl = {}) {
    check_bessel_order(nu);
    if (!(x > 0.0))
        throw domain_error("bessel_i: x must be positive");
    const double t = tilde_j(nu, {-x * x, 0.0}, ctl).real();
    return std::pow(x / 2.0, nu) * t / std::tgamma(1.0 + nu);
}

/// McMahon's leading-order estimate (m + ν/2 − 1/4)π of the m-th zero of J_ν.
inline double bessel_zero_guess(double nu, int m) {
    return (m + nu / 2.0 - 0.25) * std::numbers::pi;
}

namespace detail {

/// Memoized zeros of J̃_ν(x²) on (0, √domain_radius], one entry per (ν, radius).
/// Readers share the lock; a miss computes outside the lock and inserts under
/// exclusion, so concurrent misses on the same key do redundant but identical work.
class zero_cache {
public:
    static zero_cache& instance() {
        static zero_cache cache;
        return cache;
    }

    template <class Compute>
    std::vector<double> get(double nu, double radius, Compute&& compute) {
        const auto key = std::make_pair(nu, radius);
        {
            std::shared_lock lock(mutex_);
            if (auto it = table_.find(key); it != table_.end())
                return it->second;
        }
        std::vector<double> zeros = compute();
        std::unique_lock lock(mutex_);
        return table_.try_emplace(key, std::move(zeros)).first->second;
    }

    void clear() {
        std::unique_lock lock(mutex_);
        table_.clear();
    }

private:
    std::shared_mutex mutex_;
    std::map<std::pair<double, double>, std::vector<double>> table_;
};

inline double tilde_j_at(double nu, double x, const SeriesControl& ctl) {
    return static_cast<double>(tilde_j_series<wide_real>(nu, {x * x, 0.0}, ctl, false, false).value.re);
}

/// Bisection on g(x) = J̃_ν(x²) down to adjacent doubles, then a guarded
/// Newton polish with g'(x) = 2x J̃'_ν(x²).
inline double refine_zero(double nu, double a, double b, const SeriesControl& ctl) {
    double ga = tilde_j_at(nu, a, ctl);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        const double gm = tilde_j_at(nu, mid, ctl);
        if (gm == 0.0)
            return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 3; ++it) {
        auto s = tilde_j_series<wide_real>(nu, {x * x, 0.0}, ctl, true, false);
        const double g = static_cast<double>(s.value.re);
        const double dg = 2.0 * x * static_cast<double>(s.derivative.re);
        if (g == 0.0 || dg == 0.0)
            break;
        const double next = x - g / dg;
        if (!(next >= a && next <= b) || next == x)
            break;
        x = next;
    }
    return x;
}

/// All positive zeros of J_ν up to x_max, ascending.
///
/// Sign changes of J̃_ν(x²) are located on a uniform x-grid using a double
/// precision sum (fast, and only signs are needed), then refined in wide
/// precision. Consecutive zeros of J_ν are more than 2 apart for ν > −1 except
/// the first zero for ν near −1, which sits near 2√(1+ν); the grid step
/// resolves both.
inline std::vector<double> scan_zeros(double nu, double x_max, const SeriesControl& ctl) {
    double h = 0.01;
    if (nu < 0.0)
        h = std::min(h, 0.25 * std::sqrt(1.0 + nu));
    std::vector<double> zeros;
    double x_prev = 0.0;
    double g_prev = 1.0;
    const int n = static_cast<int>(std::ceil(x_max / h));
    for (int i = 1; i <= n; ++i) {
        const double x = std::min(x_max, i * h);
        const double g = static_cast<double>(
            tilde_j_series<double>(nu, {x * x, 0.0}, ctl, false, false).value.re);
        if ((g < 0.0) != (g_prev < 0.0))
            zeros.push_back(refine_zero(nu, x_prev, x, ctl));
        x_prev = x;
        g_prev = g;
    }
    return zeros;
}

}  // namespace detail

/// All positive zeros λ_{m,ν} of J_ν inside the series window, ascending.
inline std::vector<double> bessel_zeros(double nu, const SeriesControl& ctl = {}) {
    check_bessel_order(nu);
    ctl.validate();
    const double x_max = std::sqrt(ctl.domain_radius);
    return detail::zero_cache::instance().get(nu, ctl.domain_radius,
                                              [&] { return detail::scan_zeros(nu, x_max, ctl); });
}

/// λ_{m,ν}, the m-th strictly positive zero of J_ν, accurate to ~1e-15 relative.
inline double bessel_zero(double nu, int m, const SeriesControl& ctl = {}) {
    if (m < 1)
        throw domain_error("bessel_zero: m must be positive");
    const auto zeros = bessel_zeros(nu, ctl);
    if (static_cast<std::size_t>(m) > zeros.size())
        throw range_error("bessel_zero: zero " + std::to_string(m) + " of order " + std::to_string(nu) +
                          " lies beyond the series window sqrt(" + std::to_string(ctl.domain_radius) + ")");
    return zeros[static_cast<std::size_t>(m - 1)];
}

}  // namespace qhybrid
