#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hurwitz/tau.hpp"

using namespace hurwitz;

static std::vector<cd> random_config(std::mt19937& rng, int count, double spread) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    while (true) {
        std::vector<cd> pts;
        for (int i = 0; i < count; ++i) pts.push_back(cd(spread * U(rng), 0.5 * spread * U(rng)));
        bool ok = true;
        for (size_t j = 0; j < pts.size() && ok; ++j)
            for (size_t k = j + 1; k < pts.size(); ++k)
                if (std::abs(pts[j] - pts[k]) < 0.3) {
                    ok = false;
                    break;
                }
        if (ok) return pts;
    }
}

TEST_CASE("hyperelliptic route is translation invariant") {
    for (int count : {4, 6}) {
        std::mt19937 rng(11 + count);
        std::vector<cd> pts = random_config(rng, count, 2.5);
        std::vector<cd> moved = pts;
        for (cd& p : moved) p += cd(0.7, -1.3);
        TauResult t0 = tau_hyperelliptic(build_curve(pts), compute_periods(build_curve(pts)));
        TauResult t1 = tau_hyperelliptic(build_curve(moved), compute_periods(build_curve(moved)));
        CHECK(std::abs(t0.log_abs - t1.log_abs) < 1e-9);
    }
}

TEST_CASE("hyperelliptic route obeys the scaling law") {
    const double c = 1.7;
    for (int count : {4, 6, 8}) {
        std::mt19937 rng(29 + count);
        std::vector<cd> pts = random_config(rng, count, 2.5);
        std::vector<cd> scaled = pts;
        for (cd& p : scaled) p *= c;
        int g = count / 2 - 1;
        TauResult t0 = tau_hyperelliptic(build_curve(pts), compute_periods(build_curve(pts)));
        TauResult t1 = tau_hyperelliptic(build_curve(scaled), compute_periods(build_curve(scaled)));
        double expected = 0.25 * (g + 1) * std::log(c);
        CHECK(std::abs((t1.log_abs - t0.log_abs) - expected) < 1e-8);
    }
}

TEST_CASE("eta and hyperelliptic routes differ by a constant at genus one") {
    std::mt19937 rng(5);
    std::vector<double> diffs;
    for (int trial = 0; trial < 5; ++trial) {
        Curve c = build_curve(random_config(rng, 4, 2.5));
        PeriodData pd = compute_periods(c);
        diffs.push_back(tau_hyperelliptic(c, pd).log_abs - tau_genus1(c, pd).log_abs);
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= diffs.size();
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    CHECK(std::sqrt(var / diffs.size()) < 1e-6);
}

TEST_CASE("theta and hyperelliptic routes differ by a constant at genus two") {
    std::mt19937 rng(7);
    std::vector<double> diffs;
    for (int trial = 0; trial < 5; ++trial) {
        Curve c = build_curve(random_config(rng, 6, 3.0));
        PeriodData pd = compute_periods(c);
        SurfacePoint P0 = SurfacePoint::generic(cd(0.41, 1.9) * c.scale(), +1);
        SurfacePoint Q0 = SurfacePoint::generic(cd(-0.23, -1.6) * c.scale(), -1);
        diffs.push_back(tau_theta(c, pd, P0, Q0).log_abs - tau_hyperelliptic(c, pd).log_abs);
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= diffs.size();
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    CHECK(std::sqrt(var / diffs.size()) < 1e-5);
}

TEST_CASE("divisor class closes on the lattice and normalizes") {
    std::mt19937 rng(13);
    for (int count : {4, 6}) {
        for (int trial = 0; trial < 8; ++trial) {
            Curve c = build_curve(random_config(rng, count, 2.8));
            PeriodData pd = compute_periods(c);
            DivisorClass dc = divisor_class_vectors(c, pd);
            CHECK(dc.defect < 1e-6);
            CHECK(dc.normalized);
        }
    }
}

TEST_CASE("path shifts move the class vectors by unit steps") {
    Curve c = build_curve({cd(0), cd(1), cd(2, 0.6), cd(3, 0.6), cd(5), cd(6)});
    PeriodData pd = compute_periods(c);
    const int g = c.genus();
    for (int al = 0; al < g; ++al) {
        Vec shift = Vec::Zero(g);
        shift(al) = 1.0;  // an extra a-loop on the divisor path
        DivisorClass dc = divisor_class_vectors(c, pd, shift);
        CHECK(dc.r.cwiseAbs().maxCoeff() == 0);
        CHECK(std::abs(dc.s(al)) == 1);

        DivisorClass db = divisor_class_vectors(c, pd, Vec(pd.B.col(al)));
        CHECK(std::abs(db.r(al)) == 1);
        CHECK(db.s.cwiseAbs().maxCoeff() == 0);
    }
}

TEST_CASE("log tau derivative matches the projective connection") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    double h = 1e-4 * c.scale();
    for (int m = 0; m < 4; ++m) {
        double r1 = validate_deftau(c, m, h);
        double r2 = validate_deftau(c, m, 0.5 * h);
        CHECK(r1 < 1e-4);
        double ratio = r2 / r1;
        CHECK(ratio > 0.15);
        CHECK(ratio < 0.40);
    }
}

TEST_CASE("F is independent of the evaluation point") {
    Curve c = build_curve({cd(0), cd(1), cd(2, 0.6), cd(3, 0.6), cd(5), cd(6)});
    PeriodData pd = compute_periods(c);
    std::vector<OddSpinData> spins = all_odd_spins(c, pd);
    std::vector<double> vals;
    for (int i = 0; i < 6; ++i) {
        cd lam = cd(2.9, 0.0) + cd(2.2, 1.7) * std::exp(cd(0.0, 1.05 * i));
        vals.push_back(F_script_log(c, pd, spins, SurfacePoint::generic(lam, i % 2 ? -1 : 1)).real());
    }
    double spread = 0.0;
    for (double v : vals) spread = std::max(spread, std::abs(v - vals[0]));
    CHECK(spread < 1e-5);
}

TEST_CASE("sixth-power and direct forms agree on a normalized class") {
    for (int count : {4, 6}) {
        Curve c = build_curve(count == 4
                                  ? std::vector<cd>{cd(0), cd(1), cd(2), cd(3)}
                                  : std::vector<cd>{cd(0), cd(1), cd(2, 0.6), cd(3, 0.6), cd(5), cd(6)});
        PeriodData pd = compute_periods(c);
        SurfacePoint P0 = SurfacePoint::generic(cd(0.9, 1.3) * c.scale(), +1);
        SurfacePoint Q0 = SurfacePoint::generic(cd(2.1, -0.8) * c.scale(), -1);
        TauResult t = tau_theta(c, pd, P0, Q0);
        REQUIRE(t.normalized);
        CHECK(t.defect < 1e-6);
    }
}

TEST_CASE("theta route rejects non-generic auxiliary points") {
    Curve c = build_curve({cd(0), cd(1), cd(2), cd(3)});
    PeriodData pd = compute_periods(c);
    SurfacePoint Q0 = SurfacePoint::generic(cd(2.1, -0.8), -1);
    CHECK_THROWS_AS(tau_theta(c, pd, SurfacePoint::branch(0), Q0), ChartOutOfRange);
}
