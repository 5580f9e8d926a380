#ifndef HURWITZ_THETA_HPP
#define HURWITZ_THETA_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/errors.hpp"

namespace hurwitz {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// A derivative multi-index: one coordinate per differentiation, e.g. {0,0,1}
// means d^3 / dz_0^2 dz_1.
using DerivIndex = std::vector<int>;

namespace detail {

inline void check_riemann_matrix(const Mat& B) {
    if (B.rows() != B.cols()) throw GenusMismatch("period matrix must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(B.imag()));
    if (llt.info() != Eigen::Success)
        throw NotUpperHalfPlane("Im B must be positive definite");
}

inline int theta_box_radius(const Mat& B, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.imag());
    double lmin = es.eigenvalues().minCoeff();
    double r = std::sqrt((std::log(1.0 / tol) + 12.0) / (std::numbers::pi * lmin));
    return static_cast<int>(std::ceil(r)) + 2;
}

} // namespace detail

// Theta(z | B) = sum over n in Z^g of exp(i pi n^T B n + 2 pi i <n, z>),
// together with an arbitrary multi-index z-derivative.  The lattice sum is
// recentred at the minimizer of the Gaussian weight and truncated on a box.
inline cd theta_deriv(const Mat& B, const Vec& z, const DerivIndex& idx, double tol = 1e-15) {
    detail::check_riemann_matrix(B);
    const int g = static_cast<int>(B.rows());
    if (idx.size() > 8) throw DerivOrderTooHigh("theta derivative order capped at 8");
    for (int i : idx)
        if (i < 0 || i >= g) throw DerivOrderTooHigh("derivative index out of range");

    Eigen::VectorXd shift =
        Eigen::MatrixXd(B.imag()).ldlt().solve(Eigen::VectorXd(-z.imag()));
    const int R = detail::theta_box_radius(B, tol);
    const cd ipi(0.0, std::numbers::pi);
    const cd twopii(0.0, 2.0 * std::numbers::pi);

    cd total(0.0, 0.0);
    Eigen::VectorXd n(g);
    std::vector<int> k(g, -R);
    while (true) {
        for (int i = 0; i < g; ++i) n(i) = std::round(shift(i)) + k[i];
        cd quad(0.0, 0.0), lin(0.0, 0.0);
        for (int i = 0; i < g; ++i) {
            for (int j2 = 0; j2 < g; ++j2) quad += n(i) * B(i, j2) * n(j2);
            lin += n(i) * z(i);
        }
        cd term = std::exp(ipi * quad + twopii * lin);
        for (int i : idx) term *= twopii * n(i);
        total += term;

        int d = 0;
        while (d < g && k[d] == R) {
            k[d] = -R;
            ++d;
        }
        if (d == g) break;
        ++k[d];
    }
    return total;
}

inline cd theta(const Mat& B, const Vec& z, double tol = 1e-15) {
    return theta_deriv(B, z, {}, tol);
}

// Theta with (possibly complex) half-integer or general characteristics p, q:
//   Theta[p,q](z) = exp(i pi p^T B p + 2 pi i <p, z + q>) Theta(z + B p + q).
// Derivatives follow from the product rule, summing over subsets of idx.
inline cd theta_char_deriv(const Mat& B, const Vec& p, const Vec& q, const Vec& z,
                           const DerivIndex& idx, double tol = 1e-15) {
    detail::check_riemann_matrix(B);
    const int g = static_cast<int>(B.rows());
    if (p.size() != g || q.size() != g || z.size() != g)
        throw GenusMismatch("characteristic dimension mismatch");
    const cd ipi(0.0, std::numbers::pi);
    const cd twopii(0.0, 2.0 * std::numbers::pi);

    Vec w = z + B * p + q;
    cd quad(0.0, 0.0), lin(0.0, 0.0);
    for (int i = 0; i < g; ++i) {
        for (int j2 = 0; j2 < g; ++j2) quad += p(i) * B(i, j2) * p(j2);
        lin += p(i) * (z(i) + q(i));
    }
    cd prefactor = std::exp(ipi * quad + twopii * lin);

    const int m = static_cast<int>(idx.size());
    if (m > 8) throw DerivOrderTooHigh("theta derivative order capped at 8");
    cd total(0.0, 0.0);
    for (int mask = 0; mask < (1 << m); ++mask) {
        cd coef(1.0, 0.0);
        DerivIndex rest;
        for (int t = 0; t < m; ++t) {
            if (mask & (1 << t))
                coef *= twopii * p(idx[t]);
            else
                rest.push_back(idx[t]);
        }
        total += coef * theta_deriv(B, w, rest, tol);
    }
    return prefactor * total;
}

inline cd theta_char(const Mat& B, const Vec& p, const Vec& q, const Vec& z, double tol = 1e-15) {
    return theta_char_deriv(B, p, q, z, {}, tol);
}

// Lattice-invariant modulus |Theta(z)| exp(-pi <Y^{-1} Im z, Im z>), Y = Im B.
// Invariant under z -> z + n + B m, so vanishing on the theta divisor can be
// tested without picking a fundamental cell.
inline double theta_reduced_modulus(const Mat& B, const Vec& z, double tol = 1e-15) {
    Eigen::VectorXd y = z.imag();
    Eigen::VectorXd w = Eigen::MatrixXd(B.imag()).ldlt().solve(y);
    return std::abs(theta(B, z, tol)) * std::exp(-std::numbers::pi * y.dot(w));
}

// Worst relative defect of the two quasi-periodicity laws at z, over all
// lattice directions.  A self-test of the truncation.
inline double theta_quasiperiod_defect(const Mat& B, const Vec& z, double tol = 1e-15) {
    const int g = static_cast<int>(B.rows());
    const cd ipi(0.0, std::numbers::pi);
    const cd twopii(0.0, 2.0 * std::numbers::pi);
    cd base = theta(B, z, tol);
    double scale = std::abs(base) + 1e-300;
    double worst = 0.0;
    for (int a = 0; a < g; ++a) {
        Vec e = Vec::Zero(g);
        e(a) = 1.0;
        worst = std::max(worst, std::abs(theta(B, z + e, tol) - base) / scale);
        cd factor = std::exp(-ipi * B(a, a) - twopii * z(a));
        cd shifted = theta(B, z + B.col(a), tol);
        worst = std::max(worst, std::abs(shifted - factor * base) / (std::abs(factor) * scale));
    }
    return worst;
}

// Residual of the heat equation dTheta/dB_ab = c_ab Theta_ab with
// c_aa = 1/(4 pi i) and c_ab = 1/(2 pi i) for a != b, by central
// differences in the period matrix.
inline double theta_heat_defect(const Mat& B, const Vec& z, int a, int b, double h = 1e-5) {
    Mat Bp = B, Bm = B;
    Bp(a, b) += h;
    Bm(a, b) -= h;
    if (a != b) {
        Bp(b, a) += h;
        Bm(b, a) -= h;
    }
    cd fd = (theta(Bp, z) - theta(Bm, z)) / (2.0 * h);
    cd coef = (a == b) ? 1.0 / cd(0.0, 4.0 * std::numbers::pi)
                       : 1.0 / cd(0.0, 2.0 * std::numbers::pi);
    cd rhs = coef * theta_deriv(B, z, {a, b});
    return std::abs(fd - rhs) / (1.0 + std::abs(rhs));
}

// Dedekind eta by the pentagonal-number series.
inline cd eta_dedekind(cd tau) {
    if (tau.imag() <= 0.0) throw NotUpperHalfPlane("eta requires Im tau > 0");
    const cd ipi(0.0, std::numbers::pi);
    cd q = std::exp(2.0 * ipi * tau);
    cd sum(0.0, 0.0);
    for (int n = -64; n <= 64; ++n) {
        double e = n * (3.0 * n - 1.0) / 2.0;
        sum += ((n % 2 == 0) ? 1.0 : -1.0) * std::exp(2.0 * ipi * tau * e);
    }
    return std::exp(ipi * tau / 12.0) * sum;
}

} // namespace hurwitz

#endif
