#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "hurwitz/theta.hpp"

using namespace hurwitz;

static const cd I(0.0, 1.0);
static const double pi = std::numbers::pi;

static Mat mat1(cd b) {
    Mat B(1, 1);
    B(0, 0) = b;
    return B;
}

static Vec vec1(cd z) {
    Vec v(1);
    v(0) = z;
    return v;
}

TEST_CASE("value at the lemniscatic point") {
    // Theta(0 | i) = pi^{1/4} / Gamma(3/4)
    double expected = std::pow(pi, 0.25) / std::tgamma(0.75);
    cd got = theta(mat1(I), vec1(0.0));
    CHECK(std::abs(got - expected) < 1e-13);
    CHECK(std::abs(got - 1.08643481121330801) < 1e-13);
}

TEST_CASE("diagonal period matrices factorize") {
    Mat B = Mat::Zero(2, 2);
    B(0, 0) = I;
    B(1, 1) = 2.0 * I;
    Vec z(2);
    z(0) = cd(0.23, 0.11);
    z(1) = cd(-0.4, 0.07);
    cd lhs = theta(B, z);
    cd rhs = theta(mat1(I), vec1(z(0))) * theta(mat1(2.0 * I), vec1(z(1)));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
}

TEST_CASE("parity and quasi-periodicity") {
    Mat B(2, 2);
    B << cd(0.1, 1.3), cd(0.2, 0.4), cd(0.2, 0.4), cd(-0.3, 1.1);
    Vec z(2);
    z(0) = cd(0.31, -0.22);
    z(1) = cd(-0.14, 0.25);
    CHECK(std::abs(theta(B, z) - theta(B, Vec(-z))) < 1e-12 * std::abs(theta(B, z)));
    CHECK(theta_quasiperiod_defect(B, z) < 1e-11);
    CHECK(theta_heat_defect(B, z, 0, 0) < 1e-7);
    CHECK(theta_heat_defect(B, z, 0, 1) < 1e-7);
}

TEST_CASE("characteristics agree with the direct sum") {
    cd b(0.3, 0.9);
    Vec p = vec1(cd(0.5, 0.0)), q = vec1(cd(0.5, 0.0));
    cd z(0.17, 0.21);
    cd direct(0.0, 0.0);
    for (int n = -30; n <= 30; ++n) {
        cd np = cd(n) + p(0);
        direct += std::exp(I * pi * np * np * b + 2.0 * pi * I * np * (z + q(0)));
    }
    cd via = theta_char(mat1(b), p, q, vec1(z));
    CHECK(std::abs(via - direct) < 1e-12 * std::abs(direct));

    // complex characteristics
    Vec pc = vec1(cd(0.2, 0.1)), qc = vec1(cd(-0.3, 0.25));
    cd direct2(0.0, 0.0);
    for (int n = -40; n <= 40; ++n) {
        cd np = cd(n) + pc(0);
        direct2 += std::exp(I * pi * np * np * b + 2.0 * pi * I * np * (z + qc(0)));
    }
    cd via2 = theta_char(mat1(b), pc, qc, vec1(z));
    CHECK(std::abs(via2 - direct2) < 1e-11 * std::abs(direct2));
}

TEST_CASE("odd characteristic vanishes at the origin") {
    cd b(0.2, 1.1);
    Vec h = vec1(cd(0.5, 0.0));
    CHECK(std::abs(theta_char(mat1(b), h, h, vec1(0.0))) < 1e-13);
    // but its first derivative does not
    CHECK(std::abs(theta_char_deriv(mat1(b), h, h, vec1(0.0), {0})) > 1e-2);
}

TEST_CASE("derivatives match finite differences") {
    Mat B(2, 2);
    B << cd(0.1, 1.2), cd(-0.15, 0.3), cd(-0.15, 0.3), cd(0.4, 0.9);
    Vec z(2);
    z(0) = cd(0.12, 0.31);
    z(1) = cd(-0.27, -0.09);
    double h = 1e-5;

    Vec zp = z, zm = z;
    zp(1) += h;
    zm(1) -= h;
    cd fd = (theta(B, zp) - theta(B, zm)) / (2.0 * h);
    CHECK(std::abs(theta_deriv(B, z, {1}) - fd) < 1e-8 * (1.0 + std::abs(fd)));

    cd fd2 = (theta(B, zp) - 2.0 * theta(B, z) + theta(B, zm)) / (h * h);
    CHECK(std::abs(theta_deriv(B, z, {1, 1}) - fd2) < 1e-4 * (1.0 + std::abs(fd2)));

    Vec p(2), q(2);
    p << cd(0.5), cd(0.0);
    q << cd(0.5), cd(0.5);
    cd fdc = (theta_char(B, p, q, zp) - theta_char(B, p, q, zm)) / (2.0 * h);
    CHECK(std::abs(theta_char_deriv(B, p, q, z, {1}) - fdc) < 1e-8 * (1.0 + std::abs(fdc)));
}

TEST_CASE("eta special value and modularity") {
    // eta(i) = Gamma(1/4) / (2 pi^{3/4})
    double expected = std::tgamma(0.25) / (2.0 * std::pow(pi, 0.75));
    CHECK(std::abs(eta_dedekind(I) - expected) < 1e-14);

    cd tau(0.37, 1.21);
    cd lhs = eta_dedekind(tau + 1.0);
    cd rhs = std::exp(I * pi / 12.0) * eta_dedekind(tau);
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));

    cd inv = eta_dedekind(-1.0 / tau);
    cd law = std::sqrt(-I * tau) * eta_dedekind(tau);
    CHECK(std::abs(inv - law) < 1e-13 * std::abs(law));

    CHECK_THROWS_AS(eta_dedekind(cd(0.3, -1.0)), NotUpperHalfPlane);
}

TEST_CASE("odd derivative ties to eta cubed") {
    // d/dz Theta[1/2,1/2](0 | tau) = -2 pi eta(tau)^3 in this convention
    cd tau(0.21, 1.4);
    Vec h = vec1(cd(0.5, 0.0));
    cd d = theta_char_deriv(mat1(tau), h, h, vec1(0.0), {0});
    cd e3 = std::pow(eta_dedekind(tau), 3);
    CHECK(std::abs(d / e3 + 2.0 * pi) < 1e-10);
}
