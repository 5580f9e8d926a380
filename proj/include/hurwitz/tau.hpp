#ifndef HURWITZ_TAU_HPP
#define HURWITZ_TAU_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/kernels.hpp"

namespace hurwitz {

enum class TauRoute { Theta, Hyperelliptic, Genus1Eta };

// The tau-function is carried as a tracked complex logarithm: the fractional
// powers make the bare value branch-convention-dependent, so all consumers
// work with log-modulus and logarithm differences.
struct TauResult {
    double log_abs = 0.0;
    double phase = 0.0;  // accumulated principal arguments, convention-dependent
    TauRoute route = TauRoute::Hyperelliptic;
    Eigen::VectorXi r, s;
    bool normalized = false;
    double defect = 0.0;  // integrality or cross-check residual, route-dependent

    cd log() const { return cd(log_abs, phase); }
};

namespace detail {

inline void acc_log(TauResult& t, cd factor_log) {
    t.log_abs += factor_log.real();
    t.phase += factor_log.imag();
}

// reduce an angle to (-pi, pi]
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * std::numbers::pi);
    if (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

} // namespace detail

// ln tau = ln det A + (1/4) sum_{j<k} ln(lambda_j - lambda_k), where A is the
// matrix of a-periods of the monomial differentials lambda^{b-1}/nu.
inline TauResult tau_hyperelliptic(const Curve& curve, const PeriodData& pd) {
    TauResult t;
    t.route = TauRoute::Hyperelliptic;
    Eigen::FullPivLU<Mat> lu(pd.A);
    cd det = lu.determinant();
    if (std::abs(det) < 1e-250) throw SingularA("determinant of the a-period matrix underflows");
    detail::acc_log(t, std::log(det));
    const auto& pts = curve.config.points;
    for (size_t j = 0; j < pts.size(); ++j)
        for (size_t k = j + 1; k < pts.size(); ++k)
            detail::acc_log(t, 0.25 * std::log(pts[j] - pts[k]));
    return t;
}

// Elliptic closed form: ln tau = 2 ln eta(B) - (1/12) sum_k d_k ln v(D_k),
// with v evaluated in the chart carried by each divisor point.
inline TauResult tau_genus1(const Curve& curve, const PeriodData& pd) {
    if (curve.genus() != 1) throw GenusMismatch("eta route requires genus one");
    TauResult t;
    t.route = TauRoute::Genus1Eta;
    detail::acc_log(t, 2.0 * std::log(eta_dedekind(pd.B(0, 0))));
    for (const auto& e : curve.divisor.entries) {
        cd v = v_at(curve, pd, e.point)(0);
        detail::acc_log(t, -(e.multiplicity / 12.0) * std::log(v));
    }
    return t;
}

struct DivisorClass {
    Eigen::VectorXi r, s;
    double defect = 0.0;
    bool normalized = false;
};

// Solve A(D) + 2K + B r + s = 0 for integer vectors r, s by decomposing the
// left side in the (I, B) basis of the real lattice.  `shift` emulates a
// modified integration path for the divisor (adding a full a- or b-loop).
inline DivisorClass divisor_class_vectors(const Curve& curve, const PeriodData& pd,
                                          const Vec& shift = Vec()) {
    const int g = curve.genus();
    Vec z = 2.0 * riemann_constants(curve, pd);
    for (const auto& e : curve.divisor.entries)
        z += cd(e.multiplicity) * abel_leg(curve, pd, e.point);
    if (shift.size() == g) z += shift;

    Eigen::VectorXd rr = Eigen::MatrixXd(pd.B.imag()).ldlt().solve(Eigen::VectorXd(-z.imag()));
    Eigen::VectorXd ss = -z.real() - Eigen::MatrixXd(pd.B.real()) * rr;

    DivisorClass out;
    out.r.resize(g);
    out.s.resize(g);
    for (int a = 0; a < g; ++a) {
        out.r(a) = static_cast<int>(std::lround(rr(a)));
        out.s(a) = static_cast<int>(std::lround(ss(a)));
        out.defect = std::max(out.defect, std::abs(rr(a) - out.r(a)));
        out.defect = std::max(out.defect, std::abs(ss(a) - out.s(a)));
    }
    if (out.defect > 1e-6)
        throw NotIntegral("divisor class does not close on the period lattice");
    out.normalized = (out.r.cwiseAbs().maxCoeff() == 0) && (out.s.cwiseAbs().maxCoeff() == 0);
    return out;
}

// The quantity F: a point-independent combination of the Wronskian, the fully
// contracted g-th theta derivative at K^P, and prime-form factors.  Requires
// the normalized divisor class (r = s = 0).  Returns the complex logarithm.
inline cd F_script_log(const Curve& curve, const PeriodData& pd,
                       const std::vector<OddSpinData>& spins, const SurfacePoint& P) {
    const int g = curve.genus();
    if (g < 1 || g > 3) throw UnsupportedGenus("F is evaluated for genus 1..3 only");
    DivisorClass dc = divisor_class_vectors(curve, pd);
    if (!dc.normalized) throw DomainNotNormalized("F requires r = s = 0");
    Vec KP = riemann_constants_at(curve, pd, P);
    Vec v = v_at(curve, pd, P);
    cd num = detail::c_numerator(curve, pd, KP, v);
    cd acc = std::log(num) - std::log(wronskian(curve, pd, P));
    // d pi = d lambda in the generic chart of P: no chart factor
    for (const auto& e : curve.divisor.entries)
        acc += 0.5 * (1.0 - g) * cd(e.multiplicity) *
               std::log(prime_form(curve, pd, spins, P, e.point));
    return acc;
}

inline cd F_script(const Curve& curve, const PeriodData& pd,
                   const std::vector<OddSpinData>& spins, const SurfacePoint& P) {
    return std::exp(F_script_log(curve, pd, spins, P));
}

// Theta-function route.  Evaluates the sixth power of 1/tau from the s- and
// C-differentials, prime forms against the divisor, and the lattice phase
// carried by the divisor class vector r; then ln tau = -(1/6) of that log.
// P0 and Q0 are auxiliary generic points; the result does not depend on them.
inline TauResult tau_theta(const Curve& curve, const PeriodData& pd,
                           const SurfacePoint& P0, const SurfacePoint& Q0) {
    const int g = curve.genus();
    if (g < 1 || g > 3) throw UnsupportedGenus("theta route is evaluated for genus 1..3 only");
    if (P0.chart != ChartKind::Generic || Q0.chart != ChartKind::Generic)
        throw ChartOutOfRange("auxiliary points of the theta route must be generic");
    std::vector<OddSpinData> spins = all_odd_spins(curve, pd);
    DivisorClass dc = divisor_class_vectors(curve, pd);
    Vec KP0 = riemann_constants_at(curve, pd, P0);

    const cd twopii(0.0, 2.0 * std::numbers::pi);
    cd acc(0.0, 0.0);
    if (g != 1)
        acc += (2.0 - 2.0 * g) * std::log(s_bidiff(curve, pd, spins, P0, Q0));
    cd rk(0.0, 0.0);
    for (int a = 0; a < g; ++a) rk += cd(dc.r(a)) * KP0(a);
    acc += twopii * rk;
    acc -= 4.0 * std::log(C_differential(curve, pd, P0));
    // d pi(P0)^{g-1} contributes nothing in the generic chart
    for (const auto& e : curve.divisor.entries) {
        acc += cd(e.multiplicity) * std::log(s_bidiff(curve, pd, spins, e.point, Q0));
        acc += cd((g - 1.0) * e.multiplicity) *
               std::log(prime_form(curve, pd, spins, e.point, P0));
    }

    TauResult t;
    t.route = TauRoute::Theta;
    t.r = dc.r;
    t.s = dc.s;
    t.normalized = dc.normalized;
    detail::acc_log(t, -acc / 6.0);

    if (dc.normalized) {
        // cross-check against the direct form tau = F^{2/3} prod E(D_k,D_l)^{d_k d_l/6}.
        // Eliminating s against the prime-form product at the divisor leaves the
        // chart regularization of d pi / E^{d_k} there: a factor 2 per simple
        // ramification point (d lambda = 2 x dx) and -1 per simple pole, so the
        // direct form overshoots tau^{-6} by 2^{g+1}.
        cd alt = (2.0 / 3.0) * F_script_log(curve, pd, spins, P0) -
                 (g + 1.0) / 6.0 * std::log(2.0);
        const auto& es = curve.divisor.entries;
        for (size_t k = 0; k < es.size(); ++k)
            for (size_t l = k + 1; l < es.size(); ++l)
                alt += (es[k].multiplicity * es[l].multiplicity / 6.0) *
                       std::log(prime_form(curve, pd, spins, es[k].point, es[l].point));
        t.defect = std::abs(alt.real() - t.log_abs);
    }
    return t;
}

inline TauResult tau_by_route(const Curve& curve, const PeriodData& pd, TauRoute route,
                              const SurfacePoint& P0, const SurfacePoint& Q0) {
    switch (route) {
        case TauRoute::Hyperelliptic: return tau_hyperelliptic(curve, pd);
        case TauRoute::Genus1Eta: return tau_genus1(curve, pd);
        default: return tau_theta(curve, pd, P0, Q0);
    }
}

// Residual of the defining equations: the lambda_m derivative of ln tau must
// equal -S_B(x_m)/12, with S_B the Bergman projective connection in the branch
// chart.  Central difference with full recomputation at lambda_m +/- h.
inline double validate_deftau(const Curve& curve, int m, double h,
                              TauRoute route = TauRoute::Hyperelliptic,
                              PeriodOptions options = {}) {
    std::vector<cd> up = curve.config.points, dn = curve.config.points;
    up[m] += h;
    dn[m] -= h;
    Curve cu = build_curve(up, curve.config.options);
    Curve cdn = build_curve(dn, curve.config.options);
    PeriodData pu = compute_periods(cu, options);
    PeriodData pdn = compute_periods(cdn, options);
    PeriodData p0 = compute_periods(curve, options);

    SurfacePoint P0 = SurfacePoint::generic(
        curve.config.points[0] + cd(0.31, 0.83) * curve.scale(), +1);
    SurfacePoint Q0 = SurfacePoint::generic(
        curve.config.points[0] + cd(0.67, -0.52) * curve.scale(), -1);
    TauResult tu = tau_by_route(cu, pu, route, P0, Q0);
    TauResult td = tau_by_route(cdn, pdn, route, P0, Q0);
    cd diff(tu.log_abs - td.log_abs, detail::wrap_angle(tu.phase - td.phase));
    cd fd = diff / (2.0 * h);

    std::vector<OddSpinData> spins = all_odd_spins(curve, p0);
    cd rhs = -bergman_SB_at_branch(curve, p0, spins, m) / 12.0;
    return std::abs(fd - rhs) / std::abs(rhs);
}

} // namespace hurwitz

#endif
