#pragma once

#include <qhybrid/errors.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace qhybrid {

/// Non-convex wedge {0 < r < 1, 0 < θ < π/β} with 1/2 ≤ β < 1.
class WedgeGeometry {
public:
    explicit WedgeGeometry(double beta) : beta_(beta) {
        if (!(beta >= 0.5 && beta < 1.0))
            throw domain_error("WedgeGeometry: beta must lie in [1/2, 1), got " + std::to_string(beta));
    }

    double beta() const noexcept { return beta_; }
    /// Interior angle ω = π/β ∈ (π, 2π].
    double omega() const noexcept { return std::numbers::pi / beta_; }
    /// Area π/(2β) of the unit-radius wedge.
    double area() const noexcept { return std::numbers::pi / (2.0 * beta_); }

    friend bool operator==(const WedgeGeometry&, const WedgeGeometry&) = default;

private:
    double beta_;
};

/// Vertex coupling Θ = (γ, ε; ε, α+1).
struct CouplingMatrix {
    double alpha = 0.0;  ///< wedge extension parameter
    double gamma = 0.0;  ///< lead parameter
    double eps = 0.0;    ///< lead/wedge coupling, ε ≥ 0

    CouplingMatrix() = default;
    CouplingMatrix(double alpha_, double gamma_, double eps_) : alpha(alpha_), gamma(gamma_), eps(eps_) {
        validate();
    }

    void validate() const {
        if (!std::isfinite(alpha) || !std::isfinite(gamma) || !std::isfinite(eps))
            throw domain_error("CouplingMatrix: parameters must be finite");
        if (eps < 0.0)
            throw domain_error("CouplingMatrix: eps must be non-negative");
    }

    double theta11() const noexcept { return gamma; }
    double theta12() const noexcept { return eps; }
    double theta22() const noexcept { return alpha + 1.0; }

    /// Strength a = −1/γ of the point interaction at the lead endpoint.
    std::optional<double> point_interaction_strength() const {
        if (gamma == 0.0)
            return std::nullopt;
        return -1.0 / gamma;
    }
};

/// Polar point of the wedge. Evaluators accept the closure r ∈ (0, 1],
/// θ ∈ [0, π/β] so that boundary values can be probed.
struct WedgePoint {
    double r = 0.5;
    double theta = 0.0;

    bool interior(const WedgeGeometry& g) const noexcept {
        return r > 0.0 && r < 1.0 && theta > 0.0 && theta < g.omega();
    }

    void validate(const WedgeGeometry& g) const {
        if (!(r > 0.0 && r <= 1.0) || !(theta >= 0.0 && theta <= g.omega()))
            throw domain_error("WedgePoint outside the wedge closure: r=" + std::to_string(r) +
                               " theta=" + std::to_string(theta));
    }
};

}  // namespace qhybrid
