#pragma once

// Square-root determinations.
//
// Physical sheet: Im √z > 0 on ℂ \ [0,∞), with the positive root as the
// boundary value from above on (0,∞). This is the branch of every resolvent
// and of Q^L_z = i/√z for z off the spectrum.
//
// Continued sheet: the physical branch continued from the upper rim of
// (0,∞) across the cut into the lower half-plane. There √z has positive real
// part and negative imaginary part, i.e. it is the principal root. Resonance
// poles are zeros of the secular determinant on this sheet; evaluating with
// the physical branch instead would flip the sign of Im √z below the axis
// and there would be no root near λ_m.

#include <cmath>
#include <complex>

namespace qhybrid {

inline std::complex<double> sqrt_physical(std::complex<double> z) {
    if (z.imag() == 0.0) {
        if (z.real() >= 0.0)
            return {std::sqrt(z.real()), 0.0};
        return {0.0, std::sqrt(-z.real())};
    }
    std::complex<double> s = std::sqrt(z);
    if (s.imag() < 0.0)
        s = -s;
    return s;
}

inline std::complex<double> sqrt_continued(std::complex<double> z) {
    if (z.imag() == 0.0) {
        if (z.real() >= 0.0)
            return {std::sqrt(z.real()), 0.0};
        return {0.0, std::sqrt(-z.real())};
    }
    return std::sqrt(z);
}

}  // namespace qhybrid
