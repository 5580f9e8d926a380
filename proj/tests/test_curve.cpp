#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "hurwitz/curve.hpp"
#include "hurwitz/paths.hpp"

using namespace hurwitz;

static const cd I(0.0, 1.0);

TEST_CASE("input validation") {
    CHECK_THROWS_AS(build_curve({cd(0), cd(1), cd(2)}), OddBranchCount);
    CHECK_THROWS_AS(build_curve({cd(0), cd(1)}), OddBranchCount);
    CHECK_THROWS_AS(build_curve({cd(0), cd(1), cd(1), cd(3)}), DuplicatePoints);
    CHECK_THROWS_AS(build_curve({cd(0), cd(1e-9), cd(2), cd(3)}), DegenerateSeparation);
}

TEST_CASE("construction sorts and pairs") {
    Curve c = build_curve({cd(3), cd(1), cd(0), cd(2)});
    REQUIRE(c.genus() == 1);
    REQUIRE(c.config.points[0] == cd(0));
    REQUIRE(c.config.points[3] == cd(3));
    REQUIRE(c.layout.cuts.size() == 2);
    CHECK(c.layout.cuts[0].a == cd(0));
    CHECK(c.layout.cuts[0].b == cd(1));
    CHECK(c.layout.cuts[1].a == cd(2));
    CHECK(c.layout.cuts[1].b == cd(3));
    CHECK(c.divisor.degree() == 4 - 4);

    Curve c2 = build_curve({cd(0), cd(1), cd(2), cd(3), cd(4), cd(5)});
    CHECK(c2.genus() == 2);
    CHECK(c2.divisor.degree() == 2 * c2.genus() - 2);
}

TEST_CASE("sheet involution and asymptotics") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    cd lam(0.4, 0.9);
    CHECK(std::abs(c.nu(lam, -1) + c.nu(lam, +1)) < 1e-14 * std::abs(c.nu(lam, +1)));
    cd big(1e6, 0.0);
    CHECK(std::abs(c.nu_plus(big) / std::pow(big, 2) - 1.0) < 1e-5);

    cd on_cut(0.5, 0.0);
    CHECK_THROWS_AS(c.nu(on_cut, +1), OnCut);
}

TEST_CASE("nu is single valued around a whole cut and jumps across it") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    // continuity along a loop enclosing cut [0,1]
    cd center(0.5, 0.0);
    double r = 0.8;
    cd prev = c.nu_plus(center + r);
    for (int k = 1; k <= 200; ++k) {
        cd z = center + r * std::polar(1.0, 2.0 * std::numbers::pi * k / 200);
        cd cur = c.nu_plus(z);
        CHECK(std::abs(cur - prev) < 0.2 * std::abs(prev));
        prev = cur;
    }
    CHECK(std::abs(prev - c.nu_plus(center + r)) < 1e-12);

    // jump across the cut
    cd above = c.nu_plus(cd(0.5, 1e-8));
    cd below = c.nu_plus(cd(0.5, -1e-8));
    CHECK(std::abs(above + below) < 1e-6 * std::abs(above));
}

TEST_CASE("branch chart matches the curve") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    for (int m = 0; m < 4; ++m) {
        cd s0 = c.branch_root_at_zero(m);
        cd prod(1.0, 0.0);
        for (int j = 0; j < 4; ++j)
            if (j != m) prod *= c.config.points[m] - c.config.points[j];
        CHECK(std::abs(s0 * s0 - prod) < 1e-12 * std::abs(prod));
    }

    cd x(0.05, 0.11);
    SurfacePoint p = SurfacePoint::branch(2, x);
    auto [lam, sheet] = c.resolve(p);
    CHECK(std::abs(lam - (cd(2) + x * x)) < 1e-14);
    CHECK(std::abs(c.nu(p) - c.nu(lam, sheet)) < 1e-12);
}

TEST_CASE("chart guards and jacobians") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    CHECK_THROWS_AS(c.check_chart(SurfacePoint::branch(0, cd(5.0, 0.0))), ChartOutOfRange);

    SurfacePoint p = SurfacePoint::branch(1, cd(0.1, 0.0));
    auto jb = c.chart_jacobians(p, 2);
    CHECK(std::abs(jb[0] - cd(0.2)) < 1e-14);
    CHECK(std::abs(jb[1] - cd(2.0)) < 1e-14);

    SurfacePoint q = SurfacePoint::infinity(1);
    q.chart_coord = cd(0.05, 0.0);
    auto ji = c.chart_jacobians(q, 1);
    CHECK(std::abs(ji[0] + 1.0 / (0.05 * 0.05)) < 1e-9);
}

TEST_CASE("route planner avoids the cuts") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    auto route = plan_route(c.layout, cd(0.5, -1.0), cd(0.5, 1.0), 1e-12);
    REQUIRE(route.size() >= 3);
    CHECK(route.front() == cd(0.5, -1.0));
    CHECK(route.back() == cd(0.5, 1.0));
    for (size_t i = 0; i + 1 < route.size(); ++i)
        for (const Cut& cut : c.layout.cuts)
            CHECK(!detail::segment_intersection(route[i], route[i + 1], cut.a, cut.b, 1e-12));

    // unobstructed request stays a single segment
    auto direct = plan_route(c.layout, cd(0.5, 0.5), cd(2.5, 0.5), 1e-12);
    CHECK(direct.size() == 2);
}

TEST_CASE("path integration handles square-root endpoints") {
    // int_0^1 dx / sqrt(x) = 2 via the t^2 substitution
    Path p;
    Segment s;
    s.a = cd(0.0);
    s.b = cd(1.0);
    s.sqrt_at_a = true;
    p.push_back(s);
    auto F = [](cd lam) { return Vec::Constant(1, 1.0 / std::sqrt(lam)); };
    Vec r = integrate_path(F, p, 1);
    CHECK(std::abs(r(0) - 2.0) < 1e-12);

    // and at the far end
    Path p2;
    Segment s2;
    s2.a = cd(0.0);
    s2.b = cd(1.0);
    s2.sqrt_at_b = true;
    p2.push_back(s2);
    auto F2 = [](cd lam) { return Vec::Constant(1, 1.0 / std::sqrt(1.0 - lam)); };
    Vec r2 = integrate_path(F2, p2, 1);
    CHECK(std::abs(r2(0) - 2.0) < 1e-12);

    // infinity leg: int_1^inf dx/x^2 = 1
    Path p3;
    Segment s3;
    s3.a = cd(1.0);
    s3.to_infinity = true;
    s3.dir = cd(1.0);
    p3.push_back(s3);
    auto F3 = [](cd lam) { return Vec::Constant(1, 1.0 / (lam * lam)); };
    Vec r3 = integrate_path(F3, p3, 1);
    CHECK(std::abs(r3(0) - 1.0) < 1e-12);
}
