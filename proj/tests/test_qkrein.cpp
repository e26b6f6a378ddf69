#include <qhybrid/branch.hpp>
#include <qhybrid/matrix2.hpp>
#include <qhybrid/qkrein.hpp>
#include <qhybrid/quadrature.hpp>
#include <qhybrid/spectra.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace qhybrid;
using cplx = std::complex<double>;

namespace {

bool near_pole(const WedgeGeometry& g, cplx z, double gap) {
    for (double j : bessel_zeros(g.beta()))
        if (std::abs(z - j * j) < gap)
            return true;
    return false;
}

/// (Δ + z)f at (r, θ) by second-order central differences in polar coordinates.
template <class F>
cplx helmholtz_residual(F&& f, double r, double th, cplx z, double h) {
    const cplx c = f(r, th);
    const cplx frr = (f(r + h, th) - 2.0 * c + f(r - h, th)) / (h * h);
    const cplx fr = (f(r + h, th) - f(r - h, th)) / (2.0 * h);
    const cplx ftt = (f(r, th + h) - 2.0 * c + f(r, th - h)) / (h * h);
    return frr + fr / r + ftt / (r * r) + z * c;
}

}  // namespace

TEST(Quadrature, GaussLegendreExactForPolynomials) {
    for (int n : {4, 16, 32}) {
        const GaussRule& rule = gauss_legendre(n);
        for (int d = 0; d < 2 * n; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += rule.weights[i] * std::pow(rule.nodes[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            EXPECT_NEAR(s, exact, 1e-13) << n << " " << d;
        }
    }
}

TEST(Quadrature, GradedRadialPowers) {
    for (double s : {-1.9, -1.5, -1.0, -0.5, 0.0, 0.7, 2.0}) {
        auto r = radial_integral([&](double x) { return std::pow(x, s); }, s);
        EXPECT_NEAR(r.value, 1.0 / (s + 2.0), 1e-12 * std::max(1.0, 1.0 / (s + 2.0))) << s;
    }
    EXPECT_THROW(radial_integral([](double) { return 1.0; }, -2.0), qhybrid::domain_error);
}

TEST(Quadrature, WedgeArea) {
    for (double b : {0.5, 0.75, 0.9}) {
        const WedgeGeometry g(b);
        auto a = wedge_quadrature([](double, double) { return 1.0; }, g, 0.0);
        EXPECT_NEAR(a.value, g.area(), 1e-13);
    }
}

TEST(Branch, Sheets) {
    oracle::for_all(200, 3, [](oracle::Gen& g) {
        const cplx z = g.complex_in(-50, 50, -50, 50);
        const cplx p = sqrt_physical(z), c = sqrt_continued(z);
        EXPECT_NEAR(std::abs(p * p - z), 0.0, 1e-12 * std::abs(z));
        EXPECT_NEAR(std::abs(c * c - z), 0.0, 1e-12 * std::abs(z));
        EXPECT_GE(p.imag(), 0.0);
        EXPECT_GE(c.real(), 0.0);
        return true;
    });
    EXPECT_EQ(sqrt_physical(-4.0), cplx(0.0, 2.0));
    EXPECT_EQ(sqrt_physical(9.0), cplx(3.0, 0.0));
}

TEST(Matrix2, InverseAndDet) {
    const Matrix2c m(cplx(1, 2), 3.0, cplx(0, -1), cplx(4, 0.5));
    const Matrix2c i = m.inverse();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            cplx s = 0.0;
            for (int k = 0; k < 2; ++k)
                s += m(r, k) * i(k, c);
            EXPECT_NEAR(std::abs(s - (r == c ? 1.0 : 0.0)), 0.0, 1e-15);
        }
    EXPECT_THROW(Matrix2c(1.0, 2.0, 2.0, 4.0).inverse(), qhybrid::pole_error);
}

TEST(Geometry, Validation) {
    EXPECT_THROW(WedgeGeometry(0.49), qhybrid::domain_error);
    EXPECT_THROW(WedgeGeometry(1.0), qhybrid::domain_error);
    EXPECT_NO_THROW(WedgeGeometry(0.5));
    EXPECT_THROW(CouplingMatrix(0.0, 0.0, -0.1), qhybrid::domain_error);
    EXPECT_THROW(CouplingMatrix(NAN, 0.0, 0.1), qhybrid::domain_error);
    EXPECT_DOUBLE_EQ(CouplingMatrix(2.0, 1.0, 0.5).theta22(), 3.0);
    EXPECT_DOUBLE_EQ(*CouplingMatrix(0.0, 2.0, 0.0).point_interaction_strength(), -0.5);
    EXPECT_FALSE(CouplingMatrix(0.0, 0.0, 0.0).point_interaction_strength());
}

TEST(QWedge, HalfClosedFormReal) {
    const WedgeGeometry g(0.5);
    for (int i = 1; i < 500; ++i) {
        const double lam = -300.0 + 600.0 * i / 500.0;
        if (near_pole(g, lam, 1e-3))
            continue;
        const double ref = oracle::q_half(lam).real();
        EXPECT_LT(std::abs(q_wedge(g, lam) - ref) / std::max(1.0, std::abs(ref)), 1e-10) << lam;
    }
}

TEST(QWedge, HalfClosedFormComplex) {
    const WedgeGeometry g(0.5);
    oracle::for_all(300, 41, [&](oracle::Gen& gen) {
        const cplx z = gen.complex_in(-250, 250, -100, 100);
        if (std::abs(z) > 390.0 || near_pole(g, z, 0.5))
            return false;
        const cplx ref = oracle::q_half(z);
        EXPECT_LT(std::abs(q_wedge(g, z) - ref) / std::max(1.0, std::abs(ref)), 1e-10) << z;
        return true;
    });
}

TEST(QWedge, GeneralBetaAgainstStdBessel) {
    oracle::for_all(300, 43, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.99));
        const double lam = gen.uniform(-380.0, 380.0);
        if (near_pole(g, lam, 0.5))
            return false;
        const double ref = oracle::q_wedge(g.beta(), lam);
        EXPECT_LT(std::abs(q_wedge(g, lam) - ref) / std::max(1.0, std::abs(ref)), 1e-9) << g.beta() << " " << lam;
        return true;
    });
}

TEST(QWedge, MinusOneAtOrigin) {
    for (int i = 0; i < 10; ++i)
        EXPECT_NEAR(q_wedge(WedgeGeometry(0.5 + 0.05 * i), 0.0), -1.0, 1e-15);
}

TEST(QWedge, ConjugateSymmetry) {
    oracle::for_all(100, 47, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const cplx z = gen.complex_in(-200, 200, 0.1, 100);
        const cplx a = q_wedge(g, z), b = q_wedge(g, std::conj(z));
        EXPECT_LT(std::abs(a - std::conj(b)), 1e-13 * std::max(1.0, std::abs(a)));
        return true;
    });
}

TEST(QWedge, Herglotz) {
    oracle::for_all(500, 53, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.99));
        const cplx z = gen.complex_in(-300, 300, 1e-3, 150);
        if (std::abs(z) > 399.0)
            return false;
        EXPECT_GT(q_wedge(g, z).imag(), 0.0) << z;
        EXPECT_GT(q_lead(z).imag(), 0.0) << z;
        return true;
    });
}

TEST(QWedge, DerivativeMatchesFiniteDifference) {
    oracle::for_all(100, 59, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const cplx z = gen.complex_in(-200, 200, -30, 30);
        if (near_pole(g, z, 3.0))
            return false;
        const double h = 1e-5 * std::max(1.0, std::abs(z));
        const cplx fd = (q_wedge(g, z + h) - q_wedge(g, z - h)) / (2.0 * h);
        const cplx d = q_wedge_deriv(g, z);
        EXPECT_LT(std::abs(d - fd) / std::abs(d), 1e-6) << z;
        return true;
    });
}

TEST(QWedge, DerivativeIsPositiveOnRealAxis) {
    oracle::for_all(200, 61, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.99));
        const double lam = gen.uniform(-300, 300);
        if (near_pole(g, lam, 1e-2))
            return false;
        EXPECT_GT(q_wedge_deriv(g, lam), 0.0);
        EXPECT_DOUBLE_EQ(gz_norm_sq(g, lam), q_wedge_deriv(g, lam));
        return true;
    });
}

TEST(QWedge, PlusOneIsAccurateNearOrigin) {
    const WedgeGeometry g(0.75);
    const double d0 = q_wedge_deriv(g, 0.0);
    for (double z : {1e-12, 1e-9, 1e-6}) {
        const cplx v = q_wedge_plus_one(g, z);
        EXPECT_NEAR(v.real() / z, d0, 1e-5 * d0) << z;
    }
    EXPECT_NEAR(std::abs(q_wedge_plus_one(g, cplx(3.0, 2.0)) - q_wedge(g, cplx(3.0, 2.0)) - 1.0), 0.0, 1e-13);
}

TEST(QWedge, PoleError) {
    const WedgeGeometry g(0.75);
    const double j1 = bessel_zero(0.75, 1);
    EXPECT_THROW(q_wedge(g, j1 * j1), qhybrid::pole_error);
    try {
        q_wedge(g, j1 * j1);
    } catch (const qhybrid::pole_error& e) {
        EXPECT_NEAR(e.nearest_pole(), j1 * j1, 1e-9);
    }
    EXPECT_NEAR(nearest_friedrichs_pole(g, j1 * j1 + 0.3), j1 * j1, 1e-12);
    EXPECT_THROW(q_wedge(g, 401.0), qhybrid::range_error);
}

TEST(QLead, PhysicalSheet) {
    EXPECT_NEAR(std::abs(q_lead(-1.0) - 1.0), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(q_lead(-4.0) - 0.5), 0.0, 1e-16);
    EXPECT_THROW(q_lead(0.0), qhybrid::domain_error);
    const Matrix2c qh = q_hybrid(WedgeGeometry(0.6), cplx(1.0, 1.0));
    EXPECT_EQ(qh(0, 1), cplx(0.0));
    EXPECT_NEAR(std::abs(qh(1, 1) - q_wedge(WedgeGeometry(0.6), cplx(1.0, 1.0)) - 1.0), 0.0, 1e-15);
}

TEST(Deficiency, VanishesOnOuterBoundary) {
    oracle::for_all(100, 67, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const cplx z = gen.complex_in(-200, 200, -50, 50);
        if (near_pole(g, z, 1.0))
            return false;
        const cplx q = q_wedge(g, z);
        // The two terms cancel at r = 1; compare against their size.
        const double scale = std::max(1.0, std::abs(tilde_j(-g.beta(), z)));
        EXPECT_LT(std::abs(gz_radial(g, z, q, 1.0)), 1e-13 * scale);
        EXPECT_EQ(eval_Gz(g, z, WedgePoint{0.5, 0.0}), cplx(0.0));
        EXPECT_LT(std::abs(eval_Gz(g, z, WedgePoint{0.5, g.omega()})), 1e-13 * scale);
        return true;
    });
}

TEST(Deficiency, SolvesHelmholtz) {
    oracle::for_all(30, 71, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const cplx z = gen.complex_in(-50, 50, -10, 10);
        if (near_pole(g, z, 1.0))
            return false;
        const double r = gen.uniform(0.2, 0.8), th = gen.uniform(0.3, g.omega() - 0.3);
        auto f = [&](double rr, double tt) { return eval_Gz(g, z, WedgePoint{rr, tt}); };
        const cplx res = helmholtz_residual(f, r, th, z, 1e-4);
        EXPECT_LT(std::abs(res), 1e-4 * std::max(1.0, std::abs(f(r, th)) * std::abs(z))) << z;
        return true;
    });
}

TEST(Deficiency, ZeroEnergyIsG) {
    const WedgeGeometry g(0.7);
    for (double r : {0.1, 0.5, 0.9}) {
        const WedgePoint p{r, 1.3};
        EXPECT_NEAR(std::abs(eval_Gz(g, 0.0, p) - eval_G(g, p)), 0.0, 1e-14 * std::abs(eval_G(g, p)));
        const cplx z(3.0, -1.0);
        EXPECT_NEAR(std::abs(eval_G_minus_Gz(g, z, p) - (eval_G(g, p) - eval_Gz(g, z, p))), 0.0, 1e-12);
    }
}

TEST(Pairing, ResolventIdentity) {
    oracle::for_all(12, 73, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const cplx w = gen.complex_in(-50, 100, -20, 20), z = gen.complex_in(-50, 100, -20, 20);
        if (near_pole(g, w, 2.0) || near_pole(g, z, 2.0) || std::abs(z - w) < 1.0)
            return false;
        const cplx lhs = (z - w) * gz_pairing(g, w, z).value;
        const cplx rhs = q_wedge(g, z) - q_wedge(g, w);
        EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-8);
        return true;
    });
}

TEST(Pairing, PairingWithG) {
    for (cplx z : {cplx(2.0, 1.0), cplx(-10.0, 0.0), cplx(30.0, -4.0)}) {
        const WedgeGeometry g(0.8);
        EXPECT_LT(std::abs(z * g_pairing(g, z).value - 1.0 - q_wedge(g, z)), 1e-9);
    }
}

TEST(Pairing, NormByQuadrature) {
    oracle::for_all(10, 79, [](oracle::Gen& gen) {
        const WedgeGeometry g(gen.uniform(0.5, 0.95));
        const double lam = gen.uniform(-100, 100);
        if (near_pole(g, lam, 2.0))
            return false;
        const double d = q_wedge_deriv(g, lam);
        EXPECT_LT(std::abs(gz_norm_sq_quadrature(g, lam).value - d) / d, 1e-8);
        return true;
    });
}

TEST(Trace, SingularProfileHasUnitTrace) {
    for (double b : {0.5, 0.6, 0.75, 0.9}) {
        const WedgeGeometry g(b);
        const auto t = tau_trace([&](double r, double th) { return eval_S(g, WedgePoint{r, th}); }, g);
        EXPECT_NEAR(t.value, 1.0, 1e-6) << b;
    }
}

TEST(Trace, FriedrichsModesAboveFirstAreTraceless) {
    for (double b : {0.6, 0.75, 0.9}) {
        const WedgeGeometry g(b);
        TraceControl tc;
        tc.vertex_exponent = 2.0 * b;
        for (int m = 1; m <= 2; ++m) {
            const auto t =
                tau_trace([&](double r, double th) { return eigenfunction_psi(g, m, 2, WedgePoint{r, th}); }, g, tc);
            EXPECT_NEAR(t.value, 0.0, 1e-5);
        }
        tc.vertex_exponent = b;
        const auto t1 =
            tau_trace([&](double r, double th) { return eigenfunction_psi(g, 1, 1, WedgePoint{r, th}); }, g, tc);
        EXPECT_GT(std::abs(t1.value), 1e-2);
    }
}

TEST(Trace, RegularPartOfDeficiency) {
    // G − G_z = (1 + Q_z)S + O(r^{2−β}), so τ(G − G_z) = 1 + Q_z.
    const WedgeGeometry g(0.75);
    for (cplx z : {cplx(-5.0, 0.0), cplx(4.0, 2.0)}) {
        const auto t =
            tau_trace([&](double r, double th) { return eval_G_minus_Gz(g, z, WedgePoint{r, th}); }, g);
        EXPECT_LT(std::abs(t.value - 1.0 - q_wedge(g, z)), 1e-5) << z;
    }
}
