#pragma once

#include <stdexcept>
#include <string>

namespace qhybrid {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class domain_error : public error {
public:
    using error::error;
};

/// An argument lies outside the window where the series engine is accurate.
class range_error : public error {
public:
    using error::error;
};

/// A truncated series, quadrature or extrapolation failed to reach its tolerance.
class accuracy_error : public error {
public:
    accuracy_error(const std::string& what, double estimate)
        : error(what), estimate_(estimate) {}
    explicit accuracy_error(const std::string& what) : accuracy_error(what, -1.0) {}

    /// Achieved error estimate, negative when unknown.
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// An iterative solver did not converge.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, int iterations)
        : error(what), iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

/// Evaluation hit a pole: a zero of J̃_β (Friedrichs eigenvalue λ²_{m,β}),
/// an eigenvalue of an extension, or a singular coupling matrix.
class pole_error : public domain_error {
public:
    pole_error(const std::string& what, double nearest_pole)
        : domain_error(what), nearest_pole_(nearest_pole) {}

    /// Location of the nearest known pole on the real axis, NaN when not applicable.
    double nearest_pole() const noexcept { return nearest_pole_; }

private:
    double nearest_pole_;
};

}  // namespace qhybrid
