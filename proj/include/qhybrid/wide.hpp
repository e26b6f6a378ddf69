#pragma once

// Extended-precision scalar used to sum the alternating Bessel series.
//
// For |z| up to a few hundred the terms of J̃_ν(z) grow to ~1e6 before the
// sum settles near O(0.01), so double accumulation would leave only ~7
// significant digits. Summing in binary128 keeps the rounding floor well
// below double resolution across the whole series window.

#include <cmath>
#include <complex>

namespace qhybrid {

#if defined(__SIZEOF_FLOAT128__) && !defined(QHYBRID_NO_FLOAT128)
using wide_real = __float128;
#else
using wide_real = long double;
#endif

/// Unit roundoff of wide_real.
inline constexpr double wide_epsilon() {
#if defined(__SIZEOF_FLOAT128__) && !defined(QHYBRID_NO_FLOAT128)
    return 1.925929944387235853e-34;
#else
    return static_cast<double>(__LDBL_EPSILON__);
#endif
}

/// Minimal complex arithmetic over a real type R. std::complex is only
/// specified for the three builtin floating types.
template <class R>
struct basic_complex {
    R re{0};
    R im{0};

    constexpr basic_complex() = default;
    constexpr basic_complex(R r, R i = R(0)) : re(r), im(i) {}
    explicit basic_complex(std::complex<double> z)
        : re(static_cast<R>(z.real())), im(static_cast<R>(z.imag())) {}

    std::complex<double> to_complex() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }

    basic_complex& operator+=(const basic_complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    basic_complex& operator-=(const basic_complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    basic_complex& operator*=(R s) {
        re *= s;
        im *= s;
        return *this;
    }
    basic_complex& operator*=(const basic_complex& o) {
        const R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }

    friend basic_complex operator+(basic_complex a, const basic_complex& b) { return a += b; }
    friend basic_complex operator-(basic_complex a, const basic_complex& b) { return a -= b; }
    friend basic_complex operator*(basic_complex a, const basic_complex& b) { return a *= b; }
    friend basic_complex operator*(basic_complex a, R s) { return a *= s; }
    friend basic_complex operator-(const basic_complex& a) { return {-a.re, -a.im}; }

    friend basic_complex operator/(const basic_complex& a, const basic_complex& b) {
        // Smith's algorithm
        const R ar = b.re < 0 ? -b.re : b.re;
        const R ai = b.im < 0 ? -b.im : b.im;
        if (ar >= ai) {
            const R t = b.im / b.re;
            const R d = b.re + b.im * t;
            return {(a.re + a.im * t) / d, (a.im - a.re * t) / d};
        }
        const R t = b.re / b.im;
        const R d = b.re * t + b.im;
        return {(a.re * t + a.im) / d, (a.im * t - a.re) / d};
    }
};

/// |re| + |im|, within a factor √2 of the modulus; enough for truncation tests.
template <class R>
double l1_norm(const basic_complex<R>& z) {
    const double r = static_cast<double>(z.re);
    const double i = static_cast<double>(z.im);
    return std::abs(r) + std::abs(i);
}

using wide_complex = basic_complex<wide_real>;

}  // namespace qhybrid
