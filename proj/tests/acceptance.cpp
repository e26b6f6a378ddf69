// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <qhybrid/qhybrid.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace qhybrid;
using cplx = std::complex<double>;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool near_pole(const WedgeGeometry& g, double lam, double gap) {
    if (lam <= 0.0)
        return false;
    for (double j : bessel_zeros(g.beta()))
        if (std::abs(lam - j * j) < gap)
            return true;
    return false;
}

Verdict closed_form_q() {
    const WedgeGeometry g(0.5);
    double worst_pos = 0.0, worst_neg = 0.0;
    int used = 0;
    for (int i = 1; i <= 500; ++i) {
        const double lam = 300.0 * i / 501.0;
        if (near_pole(g, lam, 1e-3))
            continue;
        const double s = std::sqrt(lam);
        worst_pos = std::max(worst_pos, rel(q_wedge(g, lam), -s / std::tan(s)));
        ++used;
    }
    for (int i = 1; i <= 500; ++i) {
        const double lam = -300.0 * i / 501.0;
        const double s = std::sqrt(-lam);
        worst_neg = std::max(worst_neg, rel(q_wedge(g, lam), -s / std::tanh(s)));
    }
    return {worst_pos <= 1e-10 && worst_neg <= 1e-10,
            fmt("max rel err %.3g on (0,300) [%g pts], %.3g on (-300,0)", worst_pos, used, worst_neg)};
}

Verdict normalization() {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        worst = std::max(worst, std::abs(q_wedge(WedgeGeometry(0.5 + 0.05 * i), 0.0) + 1.0));
    return {worst <= 1e-12, fmt("max |Q_0 + 1| = %.3g", worst)};
}

Verdict derivative_identity() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ub(0.5, 0.95), ul(-100.0, 100.0);
    double worst_fd = 0.0;
    int n = 0;
    while (n < 100) {
        const WedgeGeometry g(ub(rng));
        const double lam = ul(rng);
        if (near_pole(g, lam, 2.0))
            continue;
        const double h = 1e-5 * std::max(1.0, std::abs(lam));
        const double fd = (q_wedge(g, lam + h) - q_wedge(g, lam - h)) / (2.0 * h);
        worst_fd = std::max(worst_fd, rel(q_wedge_deriv(g, lam), fd));
        ++n;
    }
    double worst_quad = 0.0;
    int m = 0;
    while (m < 10) {
        const WedgeGeometry g(ub(rng));
        const double lam = ul(rng);
        if (near_pole(g, lam, 2.0))
            continue;
        worst_quad = std::max(worst_quad, rel(gz_norm_sq_quadrature(g, lam).value, q_wedge_deriv(g, lam)));
        ++m;
    }
    return {worst_fd <= 1e-6 && worst_quad <= 1e-4,
            fmt("finite difference %.3g (100 samples), quadrature norm %.3g (10 samples)", worst_fd, worst_quad)};
}

Verdict nonfriedrichs_oracles() {
    const double pi = std::numbers::pi;
    double worst_half = 0.0;
    const auto half = sigma_alpha(WedgeGeometry(0.5), 0.0, 250.0).all();
    bool count_ok = half.size() >= 5;
    for (std::size_t k = 0; k < std::min<std::size_t>(5, half.size()); ++k)
        worst_half = std::max(worst_half, rel(half[k].lambda, pi * pi * (k + 0.5) * (k + 0.5)));
    double worst_gen = 0.0;
    for (double b : {0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95}) {
        const WedgeGeometry g(b);
        const double jm5 = bessel_zero(-b, 5);
        const auto roots = sigma_alpha(g, 0.0, jm5 * jm5 + 1.0).all();
        count_ok = count_ok && roots.size() >= 5;
        for (int k = 1; k <= 5 && k <= static_cast<int>(roots.size()); ++k) {
            const double j = bessel_zero(-b, k);
            worst_gen = std::max(worst_gen, rel(roots[k - 1].lambda, j * j));
        }
    }
    return {count_ok && worst_half <= 1e-10 && worst_gen <= 1e-8,
            fmt("beta=1/2 max rel %.3g, general beta max rel %.3g", worst_half, worst_gen)};
}

Verdict interlacing() {
    int violations = 0;
    for (double b : {0.5, 0.7, 0.9}) {
        const WedgeGeometry g(b);
        const auto zeros = bessel_zeros(b);
        for (double alpha : {-3.0, -1.0, 0.0, 2.0}) {
            const auto sa = sigma_alpha(g, alpha, zeros[4] * zeros[4] - 1e-9);
            std::vector<SpectralPoint> single = sa.negative;
            single.insert(single.end(), sa.singleton_nonneg.begin(), sa.singleton_nonneg.end());
            if (single.size() != 1) {
                ++violations;
                continue;
            }
            const SpectralPoint& s = single.front();
            if (!(s.lambda < zeros[0] * zeros[0]))
                ++violations;
            if ((s.lambda < 0.0) != (alpha < -1.0))
                ++violations;
            if ((s.lambda == 0.0) != (alpha == -1.0))
                ++violations;
            int seen = 0;
            for (const auto& p : sa.interlaced) {
                if (p.m > 4)
                    continue;
                ++seen;
                const double lo = zeros[p.m - 1] * zeros[p.m - 1], hi = zeros[p.m] * zeros[p.m];
                if (!(p.lambda > lo && p.lambda < hi))
                    ++violations;
            }
            if (seen != 4)
                ++violations;
        }
    }
    return {violations == 0, fmt("%g violations over 12 (beta, alpha) pairs", violations)};
}

Verdict lead_bound() {
    const CouplingMatrix th(0.0, 1.0, 0.0);
    double best = 0.0;
    for (double b : {0.5, 0.75, 0.9}) {
        double here = 1.0;
        for (const auto& p : hybrid_discrete_spectrum(WedgeGeometry(b), th))
            here = std::min(here, std::abs(p.lambda + 1.0));
        best = std::max(best, here);
    }
    const double ql = std::abs(q_lead(-1.0) - cplx(1.0, 0.0));
    return {best <= 1e-10 && ql <= 1e-15, fmt("|lambda + 1| = %.3g, |Q^L_{-1} - gamma| = %.3g", best, ql)};
}

Verdict resonance_order() {
    const WedgeGeometry g(0.75);
    const double lam1 = nonfriedrichs_eigenvalue(g, 0.0, 1);
    const cplx w1 = weak_coupling_w(g, 0.0, 1.0, 1);
    auto err = [&](double eps, bool& im_neg) {
        const CouplingMatrix th(0.0, 1.0, eps);
        const Resonance r = resonance_newton(g, th, lam1 + w1 * eps * eps);
        im_neg = im_neg && r.z.imag() < 0.0;
        return std::abs(r.z - (lam1 + w1 * eps * eps));
    };
    bool im_neg = true;
    bool ok = true;
    std::string detail = "ratios";
    for (double eps : {0.2, 0.1, 0.05}) {
        const double ratio = err(eps, im_neg) / err(eps / 2.0, im_neg);
        ok = ok && ratio >= 4.0 && ratio <= 16.0;
        detail += fmt(" %.6g", ratio);
    }
    detail += im_neg ? ", Im r < 0" : ", Im r >= 0 somewhere";
    return {ok && im_neg, detail};
}

Verdict fixed_point() {
    const WedgeGeometry g(0.75);
    const double eps = 0.1;
    const CouplingMatrix th(0.0, 1.0, eps);
    const Resonance r = resonance_fixed_point(g, th, 1);
    double worst = 0.0;
    for (std::size_t i = 1; i < r.steps.size(); ++i)
        if (r.steps[i - 1] > 0.0)
            worst = std::max(worst, r.steps[i] / r.steps[i - 1]);
    const double dist = std::abs(r.z - nonfriedrichs_eigenvalue(g, 0.0, 1));
    return {worst <= 0.5 && dist <= 5.0 * eps * eps,
            fmt("max step ratio %.3g, |r - lambda_1| = %.3g (bound %.3g)", worst, dist, 5.0 * eps * eps)};
}

Verdict no_real_resonances() {
    const WedgeGeometry g(0.75);
    const double eps = 0.5;
    const CouplingMatrix th(0.0, 1.0, eps);
    double worst = std::numeric_limits<double>::infinity();
    int used = 0;
    for (int i = 1; i <= 2000; ++i) {
        const double lam = 300.0 * i / 2001.0;
        if (near_pole(g, lam, 1e-4))
            continue;
        worst = std::min(worst, std::abs(det_secular(g, th, lam)));
        ++used;
    }
    return {worst >= 1e-4 * eps * eps, fmt("min |det| = %.3g over %g points (bound %.3g)", worst, used, 1e-4 * eps * eps)};
}

Verdict unitarity() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ub(0.5, 0.999), ua(-5.0, 5.0), ug(-3.0, 3.0), ue(0.0, 3.0), uk(0.01, 19.9);
    double worst = 0.0;
    bool s22_exact = true;
    for (int i = 0; i < 10000; ++i) {
        const WedgeGeometry g(ub(rng));
        const CouplingMatrix th(ua(rng), ug(rng), ue(rng));
        const double k = uk(rng);
        worst = std::max(worst, std::abs(std::abs(reflection(g, th, k)) - 1.0));
        const Matrix2c s = s_matrix(g, th, k * k);
        s22_exact = s22_exact && s(1, 1) == cplx(1.0, 0.0);
        worst = std::max(worst, std::abs(std::abs(s(0, 0)) - 1.0));
    }
    return {worst <= 1e-12 && s22_exact,
            fmt("max ||R| - 1| = %.3g over 10000 samples", worst) + (s22_exact ? ", s22 = 1 exactly" : ", s22 != 1")};
}

Verdict sweep_shapes() {
    const WedgeGeometry g(0.75);
    std::vector<double> eps_grid;
    for (int i = 0; i <= 600; ++i)
        eps_grid.push_back(0.01 * i);
    const SweepResult se = sweep_eps(g, 0.0, 1.0, 1, eps_grid);
    bool ok = !se.lost_at.has_value();
    std::string detail;
    std::vector<double> im;
    for (const auto& row : se.rows)
        im.push_back(row.z.imag());
    if (ok) {
        const auto imin = static_cast<std::size_t>(std::min_element(im.begin(), im.end()) - im.begin());
        bool descending = std::abs(im[0]) < 1e-12;
        for (std::size_t i = 1; i <= imin; ++i)
            descending = descending && im[i] < im[i - 1];
        bool returning = imin + 1 < im.size();
        for (std::size_t i = imin + 1; i < im.size(); ++i)
            returning = returning && im[i] > im[i - 1];
        returning = returning && im.back() - im[imin] > 0.1 * std::abs(im[imin]);
        int curvature_changes = 0;
        int last_sign = 0;
        for (std::size_t i = 1; i + 1 < im.size(); ++i) {
            const double c = im[i + 1] - 2.0 * im[i] + im[i - 1];
            const int s = c > 1e-12 ? 1 : (c < -1e-12 ? -1 : 0);
            if (s != 0 && last_sign != 0 && s != last_sign)
                ++curvature_changes;
            if (s != 0)
                last_sign = s;
        }
        ok = descending && returning && curvature_changes >= 1;
        detail = fmt("eps sweep: min Im z %.4g at eps %.2f, final %.4g", im[imin], eps_grid[imin], im.back()) +
                 fmt(", curvature sign changes %g", curvature_changes);
    } else {
        detail = "eps sweep lost track: " + se.warning;
    }

    std::vector<double> beta_grid;
    for (int i = 0; i <= 49; ++i)
        beta_grid.push_back(0.5 + 0.01 * i);
    const SweepResult sb = sweep_beta(0.0, 1.0, 1.0, 1, beta_grid);
    bool all_neg = !sb.lost_at.has_value();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : sb.rows) {
        all_neg = all_neg && row.error.empty() && row.z.imag() < 0.0;
        lo = std::min(lo, row.z.imag());
        hi = std::max(hi, row.z.imag());
    }
    const bool varies = hi - lo > 10.0 * 1e-9;
    detail += fmt("; beta sweep: Im z in [%.4g, %.4g]", lo, hi) + (all_neg ? "" : ", not all negative");
    return {ok && all_neg && varies, detail};
}

Verdict greens_identities() {
    bool ok = true;
    std::string detail;
    {
        const WedgeGeometry g(0.75);
        KernelRequest req;
        req.z = cplx(-2.0, 1.0);
        req.x = 0.7;
        req.y = 0.3;
        req.p = WedgePoint{0.4, 1.0};
        req.q = WedgePoint{0.6, 2.5};
        const HybridKernel k = resolvent_hybrid(g, CouplingMatrix(0.3, 1.2, 0.0), req);
        const double off = std::max(std::abs(*k.lead_wedge), std::abs(*k.wedge_lead));
        ok = ok && off < 1e-12;
        detail += fmt("off-diagonal %.3g", off);
    }
    {
        double worst = 0.0;
        const std::vector<std::pair<cplx, cplx>> pairs{
            {cplx(-1.0, 2.0), cplx(3.0, -1.0)}, {cplx(10.0, 0.5), cplx(-5.0, 0.0)}, {cplx(20.0, 3.0), cplx(2.0, 1.0)}};
        for (double b : {0.55, 0.75, 0.9}) {
            const WedgeGeometry g(b);
            for (const auto& [w, z] : pairs) {
                const cplx lhs = (z - w) * gz_pairing(g, w, z).value;
                const cplx rhs = q_wedge(g, z) - q_wedge(g, w);
                worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            }
        }
        ok = ok && worst <= 1e-4;
        detail += fmt(", pairing identity %.3g", worst);
    }
    {
        double worst_s = 0.0, worst_psi = 0.0;
        for (double b : {0.6, 0.75, 0.9}) {
            const WedgeGeometry g(b);
            TraceControl tc;
            const auto ts = tau_trace([&](double r, double th) { return eval_S(g, WedgePoint{r, th}); }, g, tc);
            worst_s = std::max(worst_s, std::abs(ts.value - 1.0));
            TraceControl tp;
            tp.vertex_exponent = 2.0 * b;
            for (int m = 1; m <= 2; ++m) {
                const auto t = tau_trace(
                    [&](double r, double th) { return eigenfunction_psi(g, m, 2, WedgePoint{r, th}); }, g, tp);
                worst_psi = std::max(worst_psi, std::abs(t.value));
            }
        }
        ok = ok && worst_s <= 1e-6 && worst_psi <= 1e-5;
        detail += fmt(", |tau(S) - 1| %.3g, |tau(psi_{m,2})| %.3g", worst_s, worst_psi);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"closed-form Q at beta=1/2", closed_form_q},
        {"Q_0 = -1", normalization},
        {"derivative identity", derivative_identity},
        {"non-Friedrichs oracles", nonfriedrichs_oracles},
        {"interlacing and singleton", interlacing},
        {"decoupled lead bound state", lead_bound},
        {"resonance order", resonance_order},
        {"fixed-point contraction", fixed_point},
        {"no real resonances", no_real_resonances},
        {"unitarity", unitarity},
        {"sweep shape properties", sweep_shapes},
        {"Green's identities", greens_identities},
    };
    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        if (!v.pass)
            ++failed;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%zu/%zu criteria passed in %.1fs\n", criteria.size() - failed, criteria.size(), total);
    return failed == 0 ? 0 : 1;
}
