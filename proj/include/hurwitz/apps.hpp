#ifndef HURWITZ_APPS_HPP
#define HURWITZ_APPS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/tau.hpp"

namespace hurwitz {

namespace detail {

inline cd poly_eval(const std::vector<cd>& coeff, cd lam) {
    cd acc(0.0, 0.0);
    for (size_t k = coeff.size(); k-- > 0;) acc = acc * lam + coeff[k];
    return acc;
}

inline std::vector<cd> poly_deriv(const std::vector<cd>& coeff) {
    std::vector<cd> d;
    for (size_t k = 1; k < coeff.size(); ++k) d.push_back(cd(double(k)) * coeff[k]);
    if (d.empty()) d.push_back(cd(0.0, 0.0));
    return d;
}

} // namespace detail

// A differential a(lambda)/nu dlambda given by the numerator polynomial;
// holomorphic iff deg a <= g-1.
struct PrimaryDifferential {
    std::vector<cd> numerator{cd(1.0, 0.0)};  // ascending coefficients

    cd value(cd lam) const { return detail::poly_eval(numerator, lam); }
    bool holomorphic(int genus) const {
        for (size_t k = genus; k < numerator.size(); ++k)
            if (numerator[k] != cd(0.0, 0.0)) return false;
        return true;
    }
};

// y = r(lambda) + s(lambda) nu with polynomial parts, single-valued on the
// curve through the sheet sign of nu.
struct YFunction {
    std::vector<cd> r{cd(0.0, 0.0)};
    std::vector<cd> s{cd(1.0, 0.0)};
};

// Constants of a 2x2 quasi-permutation monodromy representation.  Both
// preimages of a simple branch point coincide, so the two sheet constants
// of each point must be equal.
struct QuasiPermData {
    Eigen::MatrixXd r;  // M x 2, row m = constants of the two points over lambda_m
    Vec p, q;           // theta characteristic vectors
    cd lambda0;         // normalization point, away from branch points
    int sheet0 = +1;

    double row_sum(int m) const { return r(m, 0) + r(m, 1); }
    double pair_weight(int m, int n) const { return r(m, 0) * r(n, 0) + r(m, 1) * r(n, 1); }
};

// Residue of phi^2/dlambda at ramification point m for phi = a(lambda)/nu
// dlambda.  The curve-local parameter doubles the plane residue.
inline cd residue_phi2(const Curve& curve, const PrimaryDifferential& phi, int m) {
    const auto& pts = curve.config.points;
    cd a = phi.value(pts[m]);
    cd denom(1.0, 0.0);
    for (size_t j = 0; j < pts.size(); ++j)
        if (static_cast<int>(j) != m) denom *= pts[m] - pts[j];
    return 2.0 * a * a / denom;
}

// G = -(1/2) ln tau - (1/48) sum_m ln Res_{P_m} phi^2/dlambda, up to an
// additive constant.  Complex logarithm with principal branches per term.
inline cd g_function(const Curve& curve, const PeriodData& pd, const PrimaryDifferential& phi) {
    cd acc = -0.5 * tau_hyperelliptic(curve, pd).log();
    double floor = 1e-13 * curve.scale();
    for (int m = 0; m < curve.config.count(); ++m) {
        cd res = residue_phi2(curve, phi, m);
        if (std::abs(res) < floor)
            throw ZeroResidue("primary differential vanishes at a ramification point");
        acc -= std::log(res) / 48.0;
    }
    return acc;
}

namespace detail {

// dy/dx in the branch chart of point m, by fourth-order differences of the
// chart value of y.
inline cd y_branch_deriv(const Curve& curve, const YFunction& y, int m, cd x) {
    auto yv = [&](cd xx) {
        cd lam = curve.config.points[m] + xx * xx;
        cd nu = xx * curve.branch_root_factor(m, xx * xx);
        return poly_eval(y.r, lam) + poly_eval(y.s, lam) * nu;
    };
    cd h = 1e-3 * std::sqrt(curve.chart_radius(m));
    return (8.0 * (yv(x + h) - yv(x - h)) - (yv(x + 2.0 * h) - yv(x - 2.0 * h))) / (12.0 * h);
}

} // namespace detail

// Residue of (dy)^2/dx at ramification point m: the x^{-1} coefficient of
// (dy/dx_m)^2/(2 x_m), extracted as a circle average in the branch chart.
inline cd residue_dy2(const Curve& curve, const YFunction& y, int m, int nodes = 64) {
    double t = 0.5 * std::sqrt(curve.chart_radius(m));
    cd acc(0.0, 0.0);
    for (int k = 0; k < nodes; ++k) {
        cd x = t * std::exp(cd(0.0, 2.0 * std::numbers::pi * k / nodes));
        cd d = detail::y_branch_deriv(curve, y, m, x);
        acc += 0.5 * d * d;
    }
    return acc / static_cast<double>(nodes);
}

// Genus-one free energy of the one-matrix reduction:
// F1 = (1/2) ln tau + (1/48) ln{ v_top^{1-1/d2} prod_m res (dy)^2/dx } up to
// an additive constant.
inline cd f1_one_matrix(const Curve& curve, const PeriodData& pd, const YFunction& y,
                        cd v_top, int d2) {
    cd acc = 0.5 * tau_hyperelliptic(curve, pd).log();
    acc += (1.0 - 1.0 / static_cast<double>(d2)) / 48.0 * std::log(v_top);
    double floor = 1e-13 * curve.scale();
    for (int m = 0; m < curve.config.count(); ++m) {
        cd res = residue_dy2(curve, y, m);
        if (std::abs(res) < floor)
            throw BranchOfYSingular("dy degenerates at a ramification point");
        acc += std::log(res) / 48.0;
    }
    return acc;
}

// Omega = sum over branch points of the summed sheet constants times the
// Abel map of the ramification point.
inline Vec omega_vector(const Curve& curve, const PeriodData& pd, const QuasiPermData& qp) {
    const int g = curve.genus();
    if (qp.r.rows() != curve.config.count() || qp.r.cols() != 2)
        throw SchemaError("constant matrix must be M x 2");
    for (int m = 0; m < qp.r.rows(); ++m)
        if (qp.r(m, 0) != qp.r(m, 1))
            throw SchemaError("coinciding preimages must carry equal constants");
    Vec omega = Vec::Zero(g);
    for (int m = 0; m < curve.config.count(); ++m)
        omega += cd(qp.row_sum(m)) * abel_leg(curve, pd, SurfacePoint::branch(m));
    return omega;
}

namespace detail {

inline cd malgrange_theta(const Curve& curve, const PeriodData& pd, const QuasiPermData& qp,
                          const Vec& arg) {
    cd scale = theta(pd.B, Vec::Zero(curve.genus()));
    cd val = theta_char(pd.B, qp.p, qp.q, arg);
    if (std::abs(val) < 1e-10 * std::abs(scale))
        throw MalgrangeDivisor("theta with these characteristics vanishes at Omega");
    return val;
}

} // namespace detail

// ln of the Jimbo-Miwa tau-function of the quasi-permutation Riemann-Hilbert
// problem: -(1/2) ln tau + sum_{m<l} 2 r_{ml} ln(lambda_m - lambda_l)
// + ln Theta[p;q](Omega | B).
inline TauResult jm_tau(const Curve& curve, const PeriodData& pd, const QuasiPermData& qp) {
    Vec omega = omega_vector(curve, pd, qp);
    TauResult t;
    t.route = TauRoute::Hyperelliptic;
    detail::acc_log(t, -0.5 * tau_hyperelliptic(curve, pd).log());
    const auto& pts = curve.config.points;
    for (int m = 0; m < qp.r.rows(); ++m)
        for (int l = m + 1; l < qp.r.rows(); ++l)
            detail::acc_log(t, 2.0 * qp.pair_weight(m, l) * std::log(pts[m] - pts[l]));
    detail::acc_log(t, std::log(detail::malgrange_theta(curve, pd, qp, omega)));
    return t;
}

// One entry of the normalized Riemann-Hilbert solution, chart value in the
// lambda plane.  Sheets j, k in {1, 2}; valid within the chamber of the
// normalization point (no continuation across cuts).
inline cd psi_entry(const Curve& curve, const PeriodData& pd, const QuasiPermData& qp,
                    cd lambda, int j, int k, const std::vector<OddSpinData>& spins) {
    Vec omega = omega_vector(curve, pd, qp);
    auto sheet_sign = [](int s) { return s == 1 ? +1 : -1; };
    SurfacePoint P = SurfacePoint::generic(lambda, sheet_sign(j));
    SurfacePoint P0 = SurfacePoint::generic(qp.lambda0, sheet_sign(k));

    Vec arg = abel_leg(curve, pd, P) - abel_leg(curve, pd, P0) + omega;
    cd num = theta_char(pd.B, qp.p, qp.q, arg);
    cd th0 = detail::malgrange_theta(curve, pd, qp, omega);
    // E(P0, P) ~ (lambda - lambda0) on the diagonal, so the prefactor ratio
    // normalizes to one
    cd val = (lambda - qp.lambda0) * num /
             (th0 * prime_form(curve, pd, spins, P0, P));
    for (int m = 0; m < curve.config.count(); ++m) {
        double w = qp.row_sum(m);
        if (w == 0.0) continue;
        SurfacePoint Pm = SurfacePoint::branch(m);
        cd lr = std::log(prime_form(curve, pd, spins, P, Pm)) -
                std::log(prime_form(curve, pd, spins, P0, Pm));
        val *= std::exp(cd(w) * lr);
    }
    return val;
}

inline cd psi_entry(const Curve& curve, const PeriodData& pd, const QuasiPermData& qp,
                    cd lambda, int j, int k) {
    return psi_entry(curve, pd, qp, lambda, j, k, all_odd_spins(curve, pd));
}

// 2x2 solution matrix with rows indexed by the normalization sheet and
// columns by the sheet of lambda.
inline Eigen::Matrix2cd psi_matrix(const Curve& curve, const PeriodData& pd,
                                   const QuasiPermData& qp, cd lambda,
                                   const std::vector<OddSpinData>& spins) {
    Eigen::Matrix2cd out;
    for (int k = 1; k <= 2; ++k)
        for (int j = 1; j <= 2; ++j)
            out(k - 1, j - 1) = psi_entry(curve, pd, qp, lambda, j, k, spins);
    return out;
}

} // namespace hurwitz

#endif
