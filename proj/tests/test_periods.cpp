#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "hurwitz/periods.hpp"

using namespace hurwitz;

static const cd I(0.0, 1.0);

// K(k')/K(k) for k = 1/2 by the arithmetic-geometric mean.
static double agm_ratio_quarter() {
    auto agm = [](double a, double b) {
        for (int i = 0; i < 60 && std::abs(a - b) > 1e-17; ++i) {
            double an = 0.5 * (a + b);
            b = std::sqrt(a * b);
            a = an;
        }
        return a;
    };
    double k = 0.5, kp = std::sqrt(1.0 - k * k);
    return agm(1.0, kp) / agm(1.0, k);
}

TEST_CASE("elliptic period of the 0,1,2,3 configuration") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    PeriodData pd = compute_periods(c);
    REQUIRE(pd.B.rows() == 1);
    cd expected = I * agm_ratio_quarter();
    CHECK(std::abs(pd.B(0, 0) - expected) < 1e-10);
    CHECK(pd.B(0, 0).imag() > 0.0);
}

TEST_CASE("lemniscatic period") {
    Curve c = build_curve({cd(1), cd(-1), cd(0, 1), cd(0, -1)});
    PeriodData pd = compute_periods(c);
    CHECK(std::abs(pd.B(0, 0) - cd(-1.0, 1.0)) < 1e-9);
}

TEST_CASE("period matrix is affine invariant") {
    PeriodData p1 = compute_periods(build_curve({cd(0), cd(1), cd(2), cd(3)}));
    PeriodData p2 = compute_periods(build_curve({cd(1), cd(3), cd(5), cd(7)}));
    CHECK(std::abs(p1.B(0, 0) - p2.B(0, 0)) < 1e-9);

    PeriodData q1 = compute_periods(build_curve({cd(0), cd(1), cd(2, 1), cd(3, 1), cd(5), cd(6)}));
    PeriodData q2 = compute_periods(build_curve(
        {cd(1), cd(1) + cd(2) * cd(1), cd(1) + cd(2) * cd(2, 1), cd(1) + cd(2) * cd(3, 1),
         cd(1) + cd(2) * cd(5), cd(1) + cd(2) * cd(6)}));
    CHECK((q1.B - q2.B).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("genus two period matrix is Riemann") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3), cd(4), cd(5)});
    PeriodData pd = compute_periods(c);
    REQUIRE(pd.B.rows() == 2);
    CHECK(pd.sym_defect < 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pd.B.imag());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(pd.quad_defect < 1e-10);
}

TEST_CASE("normalized basis has unit a-periods along explicit loops") {
    Curve c = build_curve({cd(0), cd(1), cd(2, 0.7), cd(3, 0.7), cd(5), cd(6)});
    PeriodData pd = compute_periods(c);
    for (int beta = 0; beta < c.genus(); ++beta) {
        const LoopData& loop = a_loop(c, pd, beta);
        CHECK(loop.closure_defect < 1e-8);
    }
}

TEST_CASE("basis values agree between charts") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3), cd(4), cd(5)});
    PeriodData pd = compute_periods(c);

    cd x(0.08, 0.13);
    SurfacePoint pb = SurfacePoint::branch(3, x);
    auto [lam, sheet] = c.resolve(pb);
    Vec chart = v_at(c, pd, pb);
    Vec gen = v_at(c, pd, SurfacePoint::generic(lam, sheet));
    // v/dx = (v/dlambda) * dlambda/dx
    CHECK((chart - gen * (2.0 * x)).cwiseAbs().maxCoeff() < 1e-9 * gen.cwiseAbs().maxCoeff());

    SurfacePoint pinf = SurfacePoint::infinity(1);
    Vec at0 = v_at(c, pd, pinf);
    pinf.chart_coord = cd(1e-5, 0.0);
    Vec near0 = v_at(c, pd, pinf);
    CHECK((at0 - near0).cwiseAbs().maxCoeff() < 1e-4 * (1.0 + at0.cwiseAbs().maxCoeff()));
}

TEST_CASE("basis derivatives match finite differences") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    PeriodData pd = compute_periods(c);

    cd lam(0.6, 0.8);
    double h = 1e-5;
    Mat d = v_derivatives(c, pd, SurfacePoint::generic(lam, +1), 2);
    Vec vp = v_at(c, pd, SurfacePoint::generic(lam + h, +1));
    Vec vm = v_at(c, pd, SurfacePoint::generic(lam - h, +1));
    Vec v0 = v_at(c, pd, SurfacePoint::generic(lam, +1));
    CHECK((d.col(0) - v0).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((d.col(1) - (vp - vm) / (2 * h)).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((d.col(2) - (vp - 2 * v0 + vm) / (h * h)).cwiseAbs().maxCoeff() < 1e-4);

    cd x(0.05, 0.02);
    Mat db = v_derivatives(c, pd, SurfacePoint::branch(2, x), 1);
    Vec bp = v_at(c, pd, SurfacePoint::branch(2, x + h));
    Vec bm = v_at(c, pd, SurfacePoint::branch(2, x - h));
    CHECK((db.col(1) - (bp - bm) / (2 * h)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Abel map of the ramification points, elliptic case") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    PeriodData pd = compute_periods(c);
    cd B = pd.B(0, 0);

    Vec a0 = abel_leg(c, pd, SurfacePoint::branch(0));
    Vec a1 = abel_leg(c, pd, SurfacePoint::branch(1));
    Vec a2 = abel_leg(c, pd, SurfacePoint::branch(2));
    CHECK(std::abs(a0(0)) < 1e-12);
    CHECK(std::abs(a1(0) - cd(-0.5)) < 1e-9);
    CHECK(std::abs(a2(0) - (-0.5 - 0.5 * B)) < 1e-9);
}

// a lattice vector n + B m with integer n, m
static bool in_lattice(const Curve& c, const PeriodData& pd, Vec z, double tol) {
    int g = c.genus();
    Eigen::MatrixXd Y = pd.B.imag();
    Eigen::VectorXd m = Y.ldlt().solve(z.imag());
    for (int i = 0; i < g; ++i)
        if (std::abs(m(i) - std::round(m(i))) > tol) return false;
    Eigen::VectorXd mr = m.unaryExpr([](double t) { return std::round(t); });
    Vec rest = z - pd.B * mr.cast<cd>();
    for (int i = 0; i < g; ++i)
        if (std::abs(rest(i).real() - std::round(rest(i).real())) > tol ||
            std::abs(rest(i).imag()) > tol)
            return false;
    return true;
}

TEST_CASE("chart and route Abel integrals agree up to periods") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3), cd(4), cd(5)});
    PeriodData pd = compute_periods(c);

    cd x(0.2, 0.1);
    SurfacePoint pb = SurfacePoint::branch(4, x);
    auto [lam, sheet] = c.resolve(pb);
    Vec via_chart = abel_leg(c, pd, pb);
    Vec via_route = abel_leg(c, pd, SurfacePoint::generic(lam, sheet));
    CHECK(in_lattice(c, pd, via_chart - via_route, 1e-7));
}

TEST_CASE("Riemann constants, elliptic case") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    PeriodData pd = compute_periods(c);
    Vec K = riemann_constants(c, pd);
    CHECK(std::abs(K(0) - 0.5 * (1.0 + pd.B(0, 0))) < 1e-12);
}
