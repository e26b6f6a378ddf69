#pragma once

#include <qhybrid/errors.hpp>

#include <array>
#include <complex>
#include <limits>

namespace qhybrid {

/// Dense 2×2 complex matrix, row-major.
struct Matrix2c {
    std::array<std::complex<double>, 4> a{};

    Matrix2c() = default;
    Matrix2c(std::complex<double> a11, std::complex<double> a12, std::complex<double> a21,
             std::complex<double> a22)
        : a{a11, a12, a21, a22} {}

    static Matrix2c diagonal(std::complex<double> d1, std::complex<double> d2) { return {d1, 0.0, 0.0, d2}; }

    std::complex<double>& operator()(int i, int j) { return a[2 * i + j]; }
    const std::complex<double>& operator()(int i, int j) const { return a[2 * i + j]; }

    std::complex<double> det() const { return a[0] * a[3] - a[1] * a[2]; }

    Matrix2c inverse() const {
        const std::complex<double> d = det();
        if (d == std::complex<double>(0.0, 0.0))
            throw pole_error("Matrix2c::inverse: singular matrix", std::numeric_limits<double>::quiet_NaN());
        return {a[3] / d, -a[1] / d, -a[2] / d, a[0] / d};
    }
};

}  // namespace qhybrid
