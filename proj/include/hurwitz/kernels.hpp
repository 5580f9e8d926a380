#ifndef HURWITZ_KERNELS_HPP
#define HURWITZ_KERNELS_HPP

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/periods.hpp"
#include "hurwitz/theta.hpp"

namespace hurwitz {

// A non-singular odd half-integer theta characteristic together with the
// gradient of Theta[delta] at the origin.  char_index pins the choice when
// configs are perturbed in finite-difference validators.
struct OddSpinData {
    Vec p, q;
    Vec grad;
    int char_index = -1;
};

namespace detail {

inline void fill_char(int code, int g, Vec& p, Vec& q) {
    p = Vec::Zero(g);
    q = Vec::Zero(g);
    for (int i = 0; i < g; ++i) {
        if (code & (1 << i)) p(i) = 0.5;
        if (code & (1 << (g + i))) q(i) = 0.5;
    }
}

inline bool char_is_odd(int code, int g) {
    int dot = 0;
    for (int i = 0; i < g; ++i)
        if ((code & (1 << i)) && (code & (1 << (g + i)))) ++dot;
    return dot % 2 == 1;
}

} // namespace detail

inline OddSpinData make_odd_spin_fixed(const Curve& curve, const PeriodData& pd, int code) {
    const int g = curve.genus();
    OddSpinData spin;
    detail::fill_char(code, g, spin.p, spin.q);
    spin.char_index = code;
    spin.grad = Vec(g);
    for (int a = 0; a < g; ++a)
        spin.grad(a) = theta_char_deriv(pd.B, spin.p, spin.q, Vec::Zero(g), {a});
    if (spin.grad.cwiseAbs().maxCoeff() < 1e-8)
        throw SingularCharacteristic("odd characteristic has vanishing gradient");
    return spin;
}

// Deterministic choice: the odd half-integer characteristic whose gradient
// at the origin has the largest norm.
inline OddSpinData make_odd_spin(const Curve& curve, const PeriodData& pd) {
    const int g = curve.genus();
    int best = -1;
    double best_norm = -1.0;
    OddSpinData best_spin;
    for (int code = 0; code < (1 << (2 * g)); ++code) {
        if (!detail::char_is_odd(code, g)) continue;
        OddSpinData spin;
        detail::fill_char(code, g, spin.p, spin.q);
        spin.char_index = code;
        spin.grad = Vec(g);
        for (int a = 0; a < g; ++a)
            spin.grad(a) = theta_char_deriv(pd.B, spin.p, spin.q, Vec::Zero(g), {a});
        double n = spin.grad.norm();
        if (n > best_norm) {
            best_norm = n;
            best = code;
            best_spin = spin;
        }
    }
    if (best < 0 || best_norm < 1e-8)
        throw SingularCharacteristic("no usable odd characteristic found");
    return best_spin;
}

// Every non-singular odd characteristic, in increasing code order.
inline std::vector<OddSpinData> all_odd_spins(const Curve& curve, const PeriodData& pd) {
    const int g = curve.genus();
    std::vector<OddSpinData> spins;
    for (int code = 0; code < (1 << (2 * g)); ++code) {
        if (!detail::char_is_odd(code, g)) continue;
        OddSpinData spin;
        detail::fill_char(code, g, spin.p, spin.q);
        spin.char_index = code;
        spin.grad = Vec(g);
        for (int a = 0; a < g; ++a)
            spin.grad(a) = theta_char_deriv(pd.B, spin.p, spin.q, Vec::Zero(g), {a});
        if (spin.grad.norm() < 1e-8) continue;
        spins.push_back(std::move(spin));
    }
    if (spins.empty()) throw SingularCharacteristic("no usable odd characteristic found");
    return spins;
}

// The kernels below do not depend on the odd characteristic, but each choice
// degenerates on the divisor of its spinor (for hyperelliptic curves: at the
// branch points it is attached to).  Pick the characteristic whose contracted
// spinor is farthest from zero at both evaluation points.
inline const OddSpinData& pick_spin(const Curve& curve, const PeriodData& pd,
                                    const std::vector<OddSpinData>& spins,
                                    const SurfacePoint& P, const SurfacePoint& Q) {
    Vec vP = v_at(curve, pd, P), vQ = v_at(curve, pd, Q);
    const OddSpinData* best = nullptr;
    double best_score = -1.0;
    for (const auto& spin : spins) {
        cd hP(0.0, 0.0), hQ(0.0, 0.0);
        for (int a = 0; a < curve.genus(); ++a) {
            hP += spin.grad(a) * vP(a);
            hQ += spin.grad(a) * vQ(a);
        }
        double n = spin.grad.norm();
        double score = std::min(std::abs(hP) / (n * vP.norm() + 1e-300),
                                std::abs(hQ) / (n * vQ.norm() + 1e-300));
        if (score > best_score) {
            best_score = score;
            best = &spin;
        }
    }
    return *best;
}

// Square root of the contracted spinor differential, principal branch in
// each chart evaluation.
inline cd h_half(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                 const SurfacePoint& P) {
    Vec v = v_at(curve, pd, P);
    cd s(0.0, 0.0);
    for (int a = 0; a < curve.genus(); ++a) s += spin.grad(a) * v(a);
    return std::sqrt(s);
}

// Prime form, chart values in the charts carried by P and Q.
inline cd prime_form(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                     const SurfacePoint& P, const SurfacePoint& Q) {
    Vec w = abel_leg(curve, pd, Q) - abel_leg(curve, pd, P);
    cd num = theta_char(pd.B, spin.p, spin.q, w);
    return num / (h_half(curve, pd, spin, P) * h_half(curve, pd, spin, Q));
}

inline cd prime_form(const Curve& curve, const PeriodData& pd,
                     const std::vector<OddSpinData>& spins, const SurfacePoint& P,
                     const SurfacePoint& Q) {
    return prime_form(curve, pd, pick_spin(curve, pd, spins, P, Q), P, Q);
}

namespace detail {

inline bool same_surface_point(const Curve& curve, const SurfacePoint& P, const SurfacePoint& Q,
                               double tol) {
    auto [lp, sp] = curve.resolve(P);
    auto [lq, sq] = curve.resolve(Q);
    return sp == sq && std::abs(lp - lq) < tol;
}

} // namespace detail

// Canonical symmetric bidifferential with zero a-periods and biresidue +1
// on the diagonal; chart values in the charts of P and Q.
inline cd bergman_W(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                    const SurfacePoint& P, const SurfacePoint& Q) {
    if (detail::same_surface_point(curve, P, Q, 1e-4 * curve.scale()))
        throw TooCloseToDiagonal("Bergman kernel needs distinct arguments");
    const int g = curve.genus();
    Vec w = abel_leg(curve, pd, Q) - abel_leg(curve, pd, P);
    cd t0 = theta_char(pd.B, spin.p, spin.q, w);
    Vec vP = v_at(curve, pd, P), vQ = v_at(curve, pd, Q);
    cd acc(0.0, 0.0);
    std::map<std::pair<int, int>, cd> d1cache;
    for (int a = 0; a < g; ++a) {
        cd ta = theta_char_deriv(pd.B, spin.p, spin.q, w, {a});
        for (int b = 0; b < g; ++b) {
            cd tb = theta_char_deriv(pd.B, spin.p, spin.q, w, {b});
            cd tab = theta_char_deriv(pd.B, spin.p, spin.q, w, {a, b});
            cd dlog2 = (tab * t0 - ta * tb) / (t0 * t0);
            acc += dlog2 * vP(a) * vQ(b);
        }
    }
    return -acc;
}

inline cd bergman_W(const Curve& curve, const PeriodData& pd,
                    const std::vector<OddSpinData>& spins, const SurfacePoint& P,
                    const SurfacePoint& Q) {
    return bergman_W(curve, pd, pick_spin(curve, pd, spins, P, Q), P, Q);
}

// Bergman projective connection at branch point m, in the x_m chart,
// extracted from the regularized diagonal with Richardson extrapolation.
inline cd bergman_SB_at_branch(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                               int m) {
    double t0 = 0.1 * std::sqrt(curve.chart_radius(m));
    auto f = [&](double t) {
        cd w = bergman_W(curve, pd, spin, SurfacePoint::branch(m, cd(t, 0.0)),
                         SurfacePoint::branch(m, cd(-t, 0.0)));
        return w - 1.0 / cd(4.0 * t * t, 0.0);
    };
    // four-stage Richardson in t^2; deeper stages lose to the 1/(4t^2)
    // cancellation noise
    cd v[4];
    for (int s = 0; s < 4; ++s) v[s] = f(t0 * std::pow(0.5, s));
    cd check;
    for (int k = 1; k < 4; ++k) {
        double w = std::pow(4.0, k);
        if (k == 3) check = v[0];
        for (int s = 0; s + k < 4; ++s) v[s] = (w * v[s + 1] - v[s]) / (w - 1.0);
    }
    if (std::abs(v[0] - check) > 1e-3 * (1.0 + std::abs(v[0])))
        throw ExtrapolationUnstable("diagonal extrapolation of the Bergman kernel diverges");
    return 6.0 * v[0];
}

inline cd bergman_SB_at_branch(const Curve& curve, const PeriodData& pd,
                               const std::vector<OddSpinData>& spins, int m) {
    SurfacePoint Pm = SurfacePoint::branch(m);
    return bergman_SB_at_branch(curve, pd, pick_spin(curve, pd, spins, Pm, Pm), m);
}

// Wronskian determinant of the normalized differentials in the chart of P.
inline cd wronskian(const Curve& curve, const PeriodData& pd, const SurfacePoint& P) {
    const int g = curve.genus();
    Mat d = v_derivatives(curve, pd, P, g - 1);
    Mat W(g, g);
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b) W(a, b) = d(b, a);
    return W.determinant();
}

// Riemann-constant vector with base point P, transported from the
// ramification basepoint.
inline Vec riemann_constants_at(const Curve& curve, const PeriodData& pd, const SurfacePoint& P) {
    Vec K = riemann_constants(curve, pd);
    double gm1 = curve.genus() - 1.0;
    if (gm1 != 0.0) K += gm1 * abel_leg(curve, pd, P);
    return K;
}

namespace detail {

// numerator of the C differential: the g-th theta derivative at K^P fully
// contracted with the basis values
inline cd c_numerator(const Curve& curve, const PeriodData& pd, const Vec& KP, const Vec& v) {
    const int g = curve.genus();
    std::map<std::vector<int>, cd> cache;
    std::vector<int> idx(g, 0);
    cd acc(0.0, 0.0);
    while (true) {
        std::vector<int> key = idx;
        std::sort(key.begin(), key.end());
        auto it = cache.find(key);
        cd dval;
        if (it == cache.end()) {
            dval = theta_deriv(pd.B, KP, key);
            cache.emplace(key, dval);
        } else {
            dval = it->second;
        }
        cd term = dval;
        for (int i : idx) term *= v(i);
        acc += term;
        int d = 0;
        while (d < g && idx[d] == g - 1) {
            idx[d] = 0;
            ++d;
        }
        if (d == g) break;
        ++idx[d];
    }
    return acc;
}

inline cd neville_to_zero(double t1, double t2, double t3, cd f1, cd f2, cd f3) {
    auto l = [&](double ti, double tj, double tk) { return (ti * tj) / ((tk - ti) * (tk - tj)); };
    return f1 * l(t2, t3, t1) + f2 * l(t1, t3, t2) + f3 * l(t1, t2, t3);
}

} // namespace detail

// The Mumford-measure differential C(P), chart value.  At divisor points
// both the Wronskian and the contracted theta derivative vanish; the value
// is recovered by extrapolating along the chart coordinate.
inline cd C_differential(const Curve& curve, const PeriodData& pd, const SurfacePoint& P) {
    auto direct = [&](const SurfacePoint& S) {
        cd W = wronskian(curve, pd, S);
        if (std::abs(W) < 1e-13) throw WronskianVanishes("Wronskian below floor");
        Vec KP = riemann_constants_at(curve, pd, S);
        Vec v = v_at(curve, pd, S);
        return detail::c_numerator(curve, pd, KP, v) / W;
    };
    bool at_divisor = (P.chart == ChartKind::Branch || P.chart == ChartKind::Infinity) &&
                      P.chart_coord == cd(0.0, 0.0);
    if (!at_divisor) return direct(P);

    double t0;
    if (P.chart == ChartKind::Branch)
        t0 = 0.2 * std::sqrt(curve.chart_radius(P.chart_index));
    else
        t0 = 0.3 / curve.infinity_radius();
    cd f[3];
    double t[3];
    for (int j = 0; j < 3; ++j) {
        t[j] = t0 / (1 << j);
        SurfacePoint Sp = P, Sm = P;
        Sp.chart_coord = cd(t[j], 0.0);
        Sm.chart_coord = cd(-t[j], 0.0);
        // symmetrize to cancel the odd part of the chart expansion
        f[j] = 0.5 * (direct(Sp) + direct(Sm));
    }
    cd lim = detail::neville_to_zero(t[0] * t[0], t[1] * t[1], t[2] * t[2], f[0], f[1], f[2]);
    if (std::abs(lim - f[2]) > 0.05 * (std::abs(lim) + 1e-12))
        throw ExtrapolationUnstable("chart-limit extrapolation of C unstable");
    return lim;
}

enum class SRoute { PrimeFormProduct, CRatio };

// The multiplicative g/2-differential s(P,Q).  Genus one uses the explicit
// elliptic formula; higher genus the C-ratio; the prime-form product route
// is only valid on normalized fundamental domains (r = s = 0).
inline cd s_bidiff(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                   const SurfacePoint& P, const SurfacePoint& Q,
                   SRoute route = SRoute::CRatio, bool normalized = false) {
    const int g = curve.genus();
    const cd ipi(0.0, std::numbers::pi);
    if (g == 1) {
        Vec dz = abel_leg(curve, pd, P) - abel_leg(curve, pd, Q);
        cd vP = v_at(curve, pd, P)(0), vQ = v_at(curve, pd, Q)(0);
        return std::exp(ipi * dz(0)) * std::sqrt(vP) / std::sqrt(vQ);
    }
    if (route == SRoute::CRatio) {
        cd ratio = C_differential(curve, pd, P) / C_differential(curve, pd, Q);
        return std::exp(std::log(ratio) / cd(1.0 - g));
    }
    if (!normalized)
        throw DomainNotNormalized("prime-form product form of s needs r = s = 0");
    cd prod(1.0, 0.0);
    for (const auto& e : curve.divisor.entries) {
        cd num = prime_form(curve, pd, spin, e.point, Q);
        cd den = prime_form(curve, pd, spin, e.point, P);
        prod *= std::pow(num / den, e.multiplicity);
    }
    // generic charts carry d pi = d lambda, chart factor 1
    return std::sqrt(prod);
}

inline cd s_bidiff(const Curve& curve, const PeriodData& pd,
                   const std::vector<OddSpinData>& spins, const SurfacePoint& P,
                   const SurfacePoint& Q, SRoute route = SRoute::CRatio,
                   bool normalized = false) {
    if (curve.genus() > 1 && route == SRoute::PrimeFormProduct) {
        if (!normalized)
            throw DomainNotNormalized("prime-form product form of s needs r = s = 0");
        cd prod(1.0, 0.0);
        for (const auto& e : curve.divisor.entries) {
            cd num = prime_form(curve, pd, spins, e.point, Q);
            cd den = prime_form(curve, pd, spins, e.point, P);
            prod *= std::pow(num / den, e.multiplicity);
        }
        return std::sqrt(prod);
    }
    return s_bidiff(curve, pd, spins.front(), P, Q, route, normalized);
}

struct RauchReport {
    double bperiods = 0.0;      // variation of the period matrix
    double differential = 0.0;  // variation of the normalized differentials
    double bergman = 0.0;       // variation of the Bergman kernel
    double primeform = 0.0;     // variation of ln E
};

namespace detail {

// d/dx_m at x_m = 0 of ln E(P, .) by central difference in the chart
// coordinate of the perturbed second argument.
inline cd dm_log_E(const Curve& curve, const PeriodData& pd, const OddSpinData& spin,
                   const SurfacePoint& P, int m, double t) {
    cd ep = prime_form(curve, pd, spin, P, SurfacePoint::branch(m, cd(t, 0.0)));
    cd em = prime_form(curve, pd, spin, P, SurfacePoint::branch(m, cd(-t, 0.0)));
    return (std::log(ep) - std::log(em)) / (2.0 * t);
}

} // namespace detail

// Central finite differences in lambda_m against the closed-form variations,
// all evaluated with a pinned odd characteristic.  Returns relative residuals.
inline RauchReport rauch_validators(const Curve& curve, int m, double h,
                                    const SurfacePoint& P, const SurfacePoint& Q,
                                    PeriodOptions options = {}) {
    std::vector<cd> pts = curve.config.points;
    std::vector<cd> up = pts, dn = pts;
    up[m] += h;
    dn[m] -= h;
    Curve cu = build_curve(up, curve.config.options);
    Curve cdn = build_curve(dn, curve.config.options);
    PeriodData pu = compute_periods(cu, options);
    PeriodData pdn = compute_periods(cdn, options);
    PeriodData p0 = compute_periods(curve, options);

    OddSpinData spin0 = make_odd_spin(curve, p0);
    OddSpinData spinu = make_odd_spin_fixed(cu, pu, spin0.char_index);
    OddSpinData spind = make_odd_spin_fixed(cdn, pdn, spin0.char_index);

    RauchReport rep;
    const cd ipi(0.0, std::numbers::pi);
    SurfacePoint Pm = SurfacePoint::branch(m);
    Vec vm = v_at(curve, p0, Pm);

    {
        Mat fd = (pu.B - pdn.B) / (2.0 * h);
        Mat rhs = ipi * (vm * vm.transpose());
        rep.bperiods = (fd - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
    }
    {
        Vec fd = (v_at(cu, pu, P) - v_at(cdn, pdn, P)) / (2.0 * h);
        cd WPm = bergman_W(curve, p0, spin0, P, Pm);
        Vec rhs = 0.5 * WPm * vm;
        rep.differential = (fd - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
    }
    {
        cd fd = (bergman_W(cu, pu, spinu, P, Q) - bergman_W(cdn, pdn, spind, P, Q)) / (2.0 * h);
        cd rhs = 0.5 * bergman_W(curve, p0, spin0, P, Pm) * bergman_W(curve, p0, spin0, Pm, Q);
        rep.bergman = std::abs(fd - rhs) / std::abs(rhs);
    }
    {
        cd fd = (std::log(prime_form(cu, pu, spinu, P, Q)) -
                 std::log(prime_form(cdn, pdn, spind, P, Q))) /
                (2.0 * h);
        double t = 1e-4 * std::sqrt(curve.chart_radius(m));
        cd dP = detail::dm_log_E(curve, p0, spin0, P, m, t);
        cd dQ = detail::dm_log_E(curve, p0, spin0, Q, m, t);
        cd rhs = -0.25 * (dP - dQ) * (dP - dQ);
        rep.primeform = std::abs(fd - rhs) / std::abs(rhs);
    }
    return rep;
}

} // namespace hurwitz

#endif
