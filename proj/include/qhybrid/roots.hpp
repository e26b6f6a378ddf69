#pragma once

#include <qhybrid/errors.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace qhybrid::detail {

/// Root of a continuous real function on a sign-change bracket [a, b].
/// Bisection down to adjacent doubles (or rel_tol), then up to three Newton
/// steps, each rejected if it leaves the final bracket.
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double a, double b, double rel_tol = 1e-15) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw error("bracketed_root: interval does not bracket a sign change");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        if (std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b)))
            break;
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    double x = (std::abs(fa) < std::abs(fb)) ? a : b;
    for (int it = 0; it < 3; ++it) {
        const double fx = f(x);
        const double d = df(x);
        if (fx == 0.0 || !(std::isfinite(d)) || d == 0.0)
            break;
        const double next = x - fx / d;
        if (!(next >= a && next <= b) || next == x)
            break;
        x = next;
    }
    return x;
}

}  // namespace qhybrid::detail
