#ifndef HURWITZ_PERIODS_HPP
#define HURWITZ_PERIODS_HPP

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/curve.hpp"
#include "hurwitz/paths.hpp"
#include "hurwitz/quadrature.hpp"
#include "hurwitz/theta.hpp"

namespace hurwitz {

struct PeriodOptions {
    int quad_order = 64;      // Gauss-Chebyshev nodes per cut
    int loop_nodes = 256;     // trapezoid nodes per a-loop (auto-enlarged)
    PathQuad path{};          // adaptive rule for corridor / route integrals
    double quad_tol = 1e-9;   // relative doubling defect allowed for A
    double sym_tol = 1e-8;    // allowed asymmetry of B
};

// Closed contour data for one a-loop: a confocal ellipse around the cut,
// traversed counterclockwise, with the holomorphic basis and the running
// Abel integral stored at the nodes.
struct LoopData {
    std::vector<cd> lambda;
    std::vector<cd> dlam;          // d lambda / d theta
    std::vector<Vec> v;            // normalized basis values (sheet +1 chart)
    std::vector<Vec> abel;         // Abel integral from the basepoint, continued along the loop
    double closure_defect = 0.0;   // | loop increment - a-period |
};

struct PeriodData {
    PeriodOptions options;
    Mat A;        // a-periods of the monomial basis lambda^{b} dlambda / nu
    Mat Braw;     // b-periods of the monomial basis
    Mat B;        // period matrix in the normalized basis, symmetrized
    Mat Vcoef;    // v_alpha = sum_b Vcoef(alpha,b) lambda^b dlambda / nu
    double sym_defect = 0.0;
    double quad_defect = 0.0;

    mutable std::map<std::array<double, 7>, Vec> leg_cache;
    mutable std::map<int, LoopData> loop_cache;
    mutable std::optional<Vec> kconst_cache;
};

namespace detail {

inline Vec monomials(cd lam, int g) {
    Vec p(g);
    cd acc(1.0, 0.0);
    for (int b = 0; b < g; ++b) {
        p(b) = acc;
        acc *= lam;
    }
    return p;
}

// a-periods of the monomial basis, counterclockwise loops around the first
// g cuts, collapsed onto the cuts (Gauss-Chebyshev absorbs the endpoint
// inverse square roots).
inline Mat monomial_a_periods(const Curve& curve, int n) {
    const int g = curve.genus();
    const QuadRule& gc = gauss_chebyshev(n);
    Mat A = Mat::Zero(g, g);
    for (int al = 0; al < g; ++al) {
        const Cut& c = curve.layout.cuts[al];
        for (int k = 0; k < n; ++k) {
            cd lam = c.mid() + c.half() * gc.nodes[k];
            cd rest(1.0, 0.0);
            for (int j = 0; j < g + 1; ++j) {
                if (j == al) continue;
                rest *= Curve::pair_root(curve.layout.cuts[j], lam);
            }
            Vec mono = monomials(lam, g);
            for (int b = 0; b < g; ++b)
                A(al, b) += cd(0.0, 2.0) * gc.weights[k] * mono(b) / rest;
        }
    }
    return A;
}

// Integral of the monomial basis along the top edge of cut j, from its
// first endpoint to its second.
inline Vec cut_top_edge_leg(const Curve& curve, int j, int n) {
    const int g = curve.genus();
    const QuadRule& gc = gauss_chebyshev(n);
    const Cut& c = curve.layout.cuts[j];
    Vec out = Vec::Zero(g);
    for (int k = 0; k < n; ++k) {
        cd lam = c.mid() + c.half() * gc.nodes[k];
        cd rest(1.0, 0.0);
        for (int q = 0; q < g + 1; ++q) {
            if (q == j) continue;
            rest *= Curve::pair_root(curve.layout.cuts[q], lam);
        }
        // nu just above the cut equals i |half| sqrt(1-t^2) * rest, and the
        // Chebyshev weight supplies the sqrt factor
        out += gc.weights[k] * monomials(lam, g) / (cd(0.0, 1.0) * rest);
    }
    return out;
}

// Monomial-basis integral along the corridor joining cut gamma to cut
// gamma+1 on sheet +1.
inline Vec corridor_leg(const Curve& curve, int gamma, const PathQuad& pq) {
    const int g = curve.genus();
    cd from = curve.config.points[2 * gamma + 1];
    cd to = curve.config.points[2 * gamma + 2];
    auto route = plan_route(curve.layout, from, to, 1e-12 * curve.scale());
    Path path = path_from_polyline(route, true, true);
    auto F = [&](cd lam) -> Vec { return monomials(lam, g) / curve.nu_plus(lam); };
    return integrate_path(F, path, g, pq);
}

} // namespace detail

inline PeriodData compute_periods(const Curve& curve, PeriodOptions options = {}) {
    const int g = curve.genus();
    if (g < 1) throw UnsupportedGenus("genus must be at least 1");

    PeriodData pd;
    pd.options = options;

    Mat A1 = detail::monomial_a_periods(curve, options.quad_order);
    Mat A2 = detail::monomial_a_periods(curve, 2 * options.quad_order);
    double scale_A = A2.cwiseAbs().maxCoeff();
    pd.quad_defect = (A2 - A1).cwiseAbs().maxCoeff() / scale_A;
    if (pd.quad_defect > options.quad_tol)
        throw QuadratureNotConverged("a-period quadrature defect " + std::to_string(pd.quad_defect));
    pd.A = A2;

    // b-cycles as telescoped chains of adjacent-cut corridors; the chain
    // through cuts gamma, gamma+1 has monomial period -2 * corridor integral
    std::vector<Vec> chain(g);
    for (int gamma = 0; gamma < g; ++gamma)
        chain[gamma] = -2.0 * detail::corridor_leg(curve, gamma, options.path);
    pd.Braw = Mat::Zero(g, g);
    for (int al = 0; al < g; ++al) {
        Vec acc = Vec::Zero(g);
        for (int gamma = al; gamma < g; ++gamma) acc += chain[gamma];
        pd.Braw.row(al) = acc.transpose();
    }

    Eigen::FullPivLU<Mat> lu(pd.A);
    if (!lu.isInvertible()) throw SingularA("a-period matrix is numerically singular");
    pd.Vcoef = lu.solve(Mat::Identity(g, g)).transpose();

    Mat B = pd.Braw * lu.inverse();
    pd.sym_defect = (B - B.transpose()).cwiseAbs().maxCoeff() / (1.0 + B.cwiseAbs().maxCoeff());
    if (pd.sym_defect > options.sym_tol)
        throw QuadratureNotConverged("period matrix asymmetry " + std::to_string(pd.sym_defect));
    pd.B = 0.5 * (B + B.transpose());

    Eigen::MatrixXd Y = pd.B.imag();
    Eigen::LLT<Eigen::MatrixXd> llt(Y);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("Im B is not positive definite");
    return pd;
}

// Normalized basis as polynomial coefficients contracted with monomials.
inline Vec c_vector(const PeriodData& pd, cd lam) {
    const int g = static_cast<int>(pd.Vcoef.rows());
    return pd.Vcoef * detail::monomials(lam, g);
}

// Chart values of the normalized holomorphic differentials at a point.
inline Vec v_at(const Curve& curve, const PeriodData& pd, const SurfacePoint& p) {
    const int g = curve.genus();
    curve.check_chart(p);
    switch (p.chart) {
        case ChartKind::Generic:
            return c_vector(pd, p.lambda) / curve.nu(p.lambda, p.sheet);
        case ChartKind::Branch: {
            cd x = p.chart_coord;
            cd lam = curve.config.points[p.chart_index] + x * x;
            return 2.0 * c_vector(pd, lam) / curve.branch_root_factor(p.chart_index, x * x);
        }
        case ChartKind::Infinity:
        default: {
            cd z = p.chart_coord;
            double s = static_cast<double>(p.sheet);
            if (z == cd(0.0, 0.0)) {
                Vec out(g);
                for (int al = 0; al < g; ++al) out(al) = -s * pd.Vcoef(al, g - 1);
                return out;
            }
            cd lam = 1.0 / z;
            return -(lam * lam) * c_vector(pd, lam) / (s * curve.nu_plus(lam));
        }
    }
}

namespace detail {

// Derivatives of an analytic chart function by Cauchy's formula on a circle.
inline std::vector<Vec> cauchy_derivatives(const std::function<Vec(cd)>& f, cd center,
                                           double radius, int order, int g, int nodes = 96) {
    std::vector<Vec> out(order + 1, Vec::Zero(g));
    std::vector<Vec> samples(nodes);
    const double pi = std::numbers::pi;
    for (int k = 0; k < nodes; ++k) {
        double th = 2.0 * pi * k / nodes;
        samples[k] = f(center + radius * std::polar(1.0, th));
    }
    for (int d = 0; d <= order; ++d) {
        Vec acc = Vec::Zero(g);
        for (int k = 0; k < nodes; ++k) {
            double th = 2.0 * pi * k / nodes;
            acc += samples[k] * std::polar(1.0, -d * th);
        }
        double fact = 1.0;
        for (int i = 2; i <= d; ++i) fact *= i;
        out[d] = acc * (fact / (nodes * std::pow(radius, d)));
    }
    return out;
}

} // namespace detail

// Derivatives of the normalized basis with respect to the chart coordinate,
// orders 0..order; column d holds the d-th derivative.
inline Mat v_derivatives(const Curve& curve, const PeriodData& pd, const SurfacePoint& p, int order) {
    const int g = curve.genus();
    if (order < 0 || order > 16) throw DerivOrderTooHigh("derivative order must be in [0,16]");
    curve.check_chart(p);
    Mat out(g, order + 1);

    if (p.chart == ChartKind::Generic) {
        cd lam = p.lambda;
        double s = static_cast<double>(p.sheet);
        cd w0 = 1.0 / curve.nu(lam, +1);
        // w = 1/nu obeys w' = u w with u = -(1/2) sum 1/(lambda - lambda_m)
        std::vector<cd> u(order + 1, cd(0.0, 0.0));
        for (int i = 0; i <= order; ++i) {
            double fact = 1.0;
            for (int q = 2; q <= i; ++q) fact *= q;
            cd acc(0.0, 0.0);
            for (cd lm : curve.config.points) acc += 1.0 / std::pow(lam - lm, i + 1);
            u[i] = -0.5 * ((i % 2 == 0) ? 1.0 : -1.0) * fact * acc;
        }
        std::vector<cd> w(order + 1, cd(0.0, 0.0));
        w[0] = w0;
        auto binom = [](int n, int k) {
            double r = 1.0;
            for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
            return r;
        };
        for (int k = 0; k < order; ++k) {
            cd acc(0.0, 0.0);
            for (int i = 0; i <= k; ++i) acc += binom(k, i) * u[i] * w[k - i];
            w[k + 1] = acc;
        }
        // derivatives of the polynomial part
        for (int al = 0; al < g; ++al) {
            std::vector<cd> cders(order + 1, cd(0.0, 0.0));
            for (int i = 0; i <= order; ++i) {
                cd acc(0.0, 0.0);
                for (int b = i; b < g; ++b) {
                    double coef = 1.0;
                    for (int q = 0; q < i; ++q) coef *= (b - q);
                    acc += pd.Vcoef(al, b) * coef * std::pow(lam, b - i);
                }
                cders[i] = acc;
            }
            for (int k = 0; k <= order; ++k) {
                cd acc(0.0, 0.0);
                for (int i = 0; i <= k; ++i) acc += binom(k, i) * cders[i] * w[k - i];
                out(al, k) = s * acc;
            }
        }
        return out;
    }

    if (p.chart == ChartKind::Branch) {
        int m = p.chart_index;
        double rad = 0.7 * (std::sqrt(curve.chart_radius(m)) - std::abs(p.chart_coord));
        if (rad <= 0.0) throw ChartOutOfRange("no room for derivative contour in branch chart");
        auto f = [&](cd x) -> Vec { return v_at(curve, pd, SurfacePoint::branch(m, x)); };
        auto ders = detail::cauchy_derivatives(f, p.chart_coord, rad, order, g);
        for (int k = 0; k <= order; ++k) out.col(k) = ders[k];
        return out;
    }

    // infinity chart
    int n = p.chart_index;
    double zmax = 1.0 / curve.infinity_radius();
    double rad = 0.7 * (zmax - std::abs(p.chart_coord));
    if (rad <= 0.0) throw ChartOutOfRange("no room for derivative contour in infinity chart");
    auto f = [&](cd z) -> Vec {
        SurfacePoint q = SurfacePoint::infinity(n);
        q.chart_coord = z;
        return v_at(curve, pd, q);
    };
    auto ders = detail::cauchy_derivatives(f, p.chart_coord, rad, order, g);
    for (int k = 0; k <= order; ++k) out.col(k) = ders[k];
    return out;
}

namespace detail {

// Launch point just off the basepoint cut, on its left side.
inline cd launch_point(const Curve& curve) {
    const Cut& c0 = curve.layout.cuts[0];
    cd u = (c0.b - c0.a) / std::abs(c0.b - c0.a);
    double d = 0.25 * std::min(std::abs(c0.b - c0.a),
                               curve.layout.distance_to_cuts_except(c0.a, 0));
    return c0.a + d * cd(0.0, 1.0) * u;
}

inline Vec route_leg_from_launch(const Curve& curve, const PeriodData& pd, cd target,
                                 int sheet, bool sqrt_end) {
    const int g = curve.genus();
    cd L0 = launch_point(curve);
    cd P0 = curve.layout.cuts[0].a;
    double s = static_cast<double>(sheet);
    auto F = [&](cd lam) -> Vec { return s * c_vector(pd, lam) / curve.nu_plus(lam); };
    Path hop;
    Segment seg;
    seg.a = P0;
    seg.b = L0;
    seg.sqrt_at_a = true;
    hop.push_back(seg);
    Vec out = integrate_path(F, hop, g, pd.options.path);
    auto route = plan_route(curve.layout, L0, target, 1e-12 * curve.scale());
    out += integrate_path(F, path_from_polyline(route, false, sqrt_end), g, pd.options.path);
    return out;
}

inline std::array<double, 7> leg_key(const SurfacePoint& p) {
    return {static_cast<double>(static_cast<int>(p.chart)),
            static_cast<double>(p.chart_index),
            static_cast<double>(p.sheet),
            p.chart_coord.real(), p.chart_coord.imag(),
            p.lambda.real(), p.lambda.imag()};
}

} // namespace detail

// Abel integral of the normalized basis from the basepoint (the first branch
// point) to Q, along a deterministic cut-avoiding path.
inline Vec abel_leg(const Curve& curve, const PeriodData& pd, const SurfacePoint& Q) {
    auto key = detail::leg_key(Q);
    auto it = pd.leg_cache.find(key);
    if (it != pd.leg_cache.end()) return it->second;

    const int g = curve.genus();
    curve.check_chart(Q);
    Vec leg = Vec::Zero(g);

    if (Q.chart == ChartKind::Branch) {
        int m = Q.chart_index;
        // skeleton: top edges of cuts and sheet +1 corridors, in index order
        int cut = m / 2;
        Mat edge(g, cut + 1);
        for (int j = 0; j <= cut; ++j)
            edge.col(j) = pd.Vcoef * detail::cut_top_edge_leg(curve, j, 2 * pd.options.quad_order);
        for (int gamma = 0; gamma < cut; ++gamma) {
            leg += edge.col(gamma);
            leg += pd.Vcoef * detail::corridor_leg(curve, gamma, pd.options.path);
        }
        if (m % 2 == 1) leg += edge.col(cut);
        if (Q.chart_coord != cd(0.0, 0.0)) {
            cd lm = curve.config.points[m];
            auto G = [&](cd x) -> Vec {
                return 2.0 * c_vector(pd, lm + x * x) / curve.branch_root_factor(m, x * x);
            };
            auto Gt = [&](double t) -> Vec { return Q.chart_coord * G(t * Q.chart_coord); };
            Vec tail = Vec::Zero(g);
            detail::adaptive_gl(Gt, 0.0, 1.0, pd.options.path.order, pd.options.path.abs_tol,
                                pd.options.path.max_depth, tail);
            leg += tail;
        }
    } else if (Q.chart == ChartKind::Generic) {
        leg = detail::route_leg_from_launch(curve, pd, Q.lambda, Q.sheet, false);
    } else {
        // infinity chart
        double s = static_cast<double>(Q.sheet);
        cd R0 = 1.25 * curve.infinity_radius();
        if (Q.chart_coord == cd(0.0, 0.0)) {
            leg = detail::route_leg_from_launch(curve, pd, R0, Q.sheet, false);
            Segment ray;
            ray.a = R0;
            ray.to_infinity = true;
            ray.dir = cd(1.0, 0.0);
            auto F = [&](cd lam) -> Vec { return s * c_vector(pd, lam) / curve.nu_plus(lam); };
            leg += integrate_path(F, Path{ray}, g, pd.options.path);
        } else {
            leg = detail::route_leg_from_launch(curve, pd, 1.0 / Q.chart_coord, Q.sheet, false);
        }
    }

    pd.leg_cache.emplace(key, leg);
    return leg;
}

inline Vec abel_map(const Curve& curve, const PeriodData& pd, const SurfacePoint& Q,
                    const SurfacePoint& base) {
    return abel_leg(curve, pd, Q) - abel_leg(curve, pd, base);
}

// Counterclockwise confocal-ellipse contour around cut beta, with basis
// values and the running Abel integral at equispaced angle nodes.
inline const LoopData& a_loop(const Curve& curve, const PeriodData& pd, int beta) {
    auto it = pd.loop_cache.find(beta);
    if (it != pd.loop_cache.end()) return it->second;

    const int g = curve.genus();
    const Cut& c = curve.layout.cuts[beta];
    double habs = std::abs(c.half());
    // distance between disjoint segments is attained at one of the endpoints
    double rho = std::min(curve.layout.distance_to_cuts_except(c.a, beta),
                          curve.layout.distance_to_cuts_except(c.b, beta));
    for (int m = 0; m < curve.config.count(); ++m) {
        if (m / 2 == beta) continue;
        rho = std::min(rho, detail::dist_point_segment(curve.config.points[m], c.a, c.b));
    }
    rho *= 0.5;
    double s = std::log1p(rho / habs);
    int N = std::max(pd.options.loop_nodes, 2 * static_cast<int>(std::ceil(30.0 / s)));

    LoopData loop;
    loop.lambda.resize(N);
    loop.dlam.resize(N);
    loop.v.resize(N);
    loop.abel.resize(N);
    const double pi = std::numbers::pi;
    double ch = std::cosh(s), sh = std::sinh(s);
    auto lam_of = [&](double th) {
        return c.mid() + c.half() * cd(std::cos(th) * ch, std::sin(th) * sh);
    };
    auto dlam_of = [&](double th) {
        return c.half() * cd(-std::sin(th) * ch, std::cos(th) * sh);
    };
    for (int k = 0; k < N; ++k) {
        double th = 2.0 * pi * k / N;
        loop.lambda[k] = lam_of(th);
        loop.dlam[k] = dlam_of(th);
        loop.v[k] = c_vector(pd, loop.lambda[k]) / curve.nu_plus(loop.lambda[k]);
    }
    loop.abel[0] = abel_leg(curve, pd, SurfacePoint::generic(loop.lambda[0], +1));
    const QuadRule& gl = gauss_legendre(8);
    for (int k = 0; k + 1 < N; ++k) {
        double a = 2.0 * pi * k / N, b = 2.0 * pi * (k + 1) / N;
        Vec inc = Vec::Zero(g);
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double th = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
            cd lam = lam_of(th);
            inc += (0.5 * (b - a) * gl.weights[q]) * dlam_of(th) *
                   (c_vector(pd, lam) / curve.nu_plus(lam));
        }
        loop.abel[k + 1] = loop.abel[k] + inc;
    }
    // closing arc should reproduce the a-period e_beta
    {
        double a = 2.0 * pi * (N - 1) / N, b = 2.0 * pi;
        Vec inc = Vec::Zero(g);
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double th = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
            cd lam = lam_of(th);
            inc += (0.5 * (b - a) * gl.weights[q]) * dlam_of(th) *
                   (c_vector(pd, lam) / curve.nu_plus(lam));
        }
        Vec closed = loop.abel[N - 1] + inc - loop.abel[0];
        Vec expect = Vec::Zero(g);
        expect(beta) = 1.0;
        loop.closure_defect = (closed - expect).cwiseAbs().maxCoeff();
    }
    return pd.loop_cache.emplace(beta, std::move(loop)).first->second;
}

namespace detail {

// The loop formula below continues the inner Abel integral along routed legs
// whose homology class relative to the canonical dissection is not tracked.
// Any b-period offset of a leg skews the result by a component-wise diagonal
// of B times an integer matrix, which is not a lattice translate.  Recover
// the true vector by searching these shifts for the one that satisfies the
// vanishing property: Theta(K - A(D)) = 0 for every effective divisor D of
// degree g-1 (tested at deterministic sample divisors), using the
// lattice-invariant reduced theta modulus.
inline Vec snap_constants_to_theta_divisor(const Curve& curve, const PeriodData& pd,
                                           const Vec& K0);

// K is defined only up to the period lattice.  When A(D) + 2K lands on an
// even lattice vector B r + s (r, s even integers), shift K by B r/2 + s/2 so
// the divisor class closes at r = s = 0; odd classes are left untouched.
inline Vec normalize_constants_to_divisor(const Curve& curve, const PeriodData& pd,
                                          const Vec& K0);

} // namespace detail

// Vector of Riemann constants with the first branch point as basepoint.
inline Vec riemann_constants(const Curve& curve, const PeriodData& pd) {
    if (pd.kconst_cache) return *pd.kconst_cache;
    const int g = curve.genus();
    const double pi = std::numbers::pi;
    Vec K(g);
    for (int al = 0; al < g; ++al) {
        cd k = 0.5 + 0.5 * pd.B(al, al);
        for (int be = 0; be < g; ++be) {
            if (be == al) continue;
            const LoopData& loop = a_loop(curve, pd, be);
            int N = static_cast<int>(loop.lambda.size());
            cd acc(0.0, 0.0);
            for (int q = 0; q < N; ++q)
                acc += loop.v[q](be) * loop.dlam[q] * loop.abel[q](al);
            k -= (2.0 * pi / N) * acc;
        }
        K(al) = k;
    }
    if (g > 1) K = detail::snap_constants_to_theta_divisor(curve, pd, K);
    K = detail::normalize_constants_to_divisor(curve, pd, K);
    pd.kconst_cache = K;
    return K;
}

namespace detail {

inline Vec snap_constants_to_theta_divisor(const Curve& curve, const PeriodData& pd,
                                           const Vec& K0) {
    const int g = curve.genus();
    const double tol = 1e-10;

    // Theta arguments that must vanish: K itself (D supported at the
    // basepoint) plus K - A(D) for generic sample divisors of degree g-1.
    cd center(0.0, 0.0);
    for (cd p : curve.config.points) center += p;
    center /= static_cast<double>(curve.config.count());
    const cd seeds[4] = {cd(0.37, 0.91), cd(-0.53, 0.64), cd(0.22, -0.78), cd(0.81, 0.33)};
    std::vector<Vec> probes;
    probes.push_back(Vec::Zero(g));
    for (int t = 0; t < 3; ++t) {
        Vec a = Vec::Zero(g);
        for (int i = 0; i < g - 1; ++i) {
            cd lam = center + curve.scale() * seeds[(t + i) % 4];
            a += abel_leg(curve, pd, SurfacePoint::generic(lam, (t + i) % 2 ? -1 : +1));
        }
        probes.push_back(a);
    }

    const int range = (g <= 2) ? 2 : 1;
    const int width = 2 * range + 1;
    const int cells = static_cast<int>(std::pow(width, g * g));
    auto score_of = [&](const Vec& K, size_t nprobe) {
        double s = 0.0;
        for (size_t t = 0; t < nprobe; ++t)
            s = std::max(s, theta_reduced_modulus(pd.B, Vec(K - probes[t]), tol));
        return s;
    };

    Vec best = K0;
    double best_score = score_of(K0, probes.size());
    int best_l1 = 0;
    double largest = best_score;
    for (int cell = 0; cell < cells; ++cell) {
        int code = cell, l1 = 0;
        Eigen::MatrixXi M(g, g);
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                M(a, b) = code % width - range;
                code /= width;
                l1 += std::abs(M(a, b));
            }
        if (l1 == 0) continue;
        Vec K = K0;
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) K(a) += cd(M(a, b)) * pd.B(a, b);
        double quick = theta_reduced_modulus(pd.B, K, tol);
        largest = std::max(largest, quick);
        if (quick > 0.3 * best_score && best_score < 0.1 * largest) continue;
        double s = score_of(K, probes.size());
        if (s < 0.3 * best_score || (s < 3.0 * best_score && l1 < best_l1)) {
            best = K;
            best_score = s;
            best_l1 = l1;
        }
    }
    if (best_score > 1e-6 * largest)
        throw BranchTrackingLost("Riemann constants do not reach the theta divisor");
    return best;
}

inline Vec normalize_constants_to_divisor(const Curve& curve, const PeriodData& pd,
                                          const Vec& K0) {
    const int g = curve.genus();
    Vec z = 2.0 * K0;
    for (const auto& e : curve.divisor.entries)
        z += cd(e.multiplicity) * abel_leg(curve, pd, e.point);
    Eigen::VectorXd rr =
        Eigen::MatrixXd(pd.B.imag()).ldlt().solve(Eigen::VectorXd(-z.imag()));
    Eigen::VectorXd ss = -z.real() - Eigen::MatrixXd(pd.B.real()) * rr;
    Eigen::VectorXi r(g), s(g);
    for (int a = 0; a < g; ++a) {
        r(a) = static_cast<int>(std::lround(rr(a)));
        s(a) = static_cast<int>(std::lround(ss(a)));
        double defect = std::max(std::abs(rr(a) - r(a)), std::abs(ss(a) - s(a)));
        if (defect > 1e-6 || r(a) % 2 != 0 || s(a) % 2 != 0) return K0;
    }
    Vec K = K0;
    for (int a = 0; a < g; ++a) {
        K(a) += 0.5 * cd(s(a));
        for (int b = 0; b < g; ++b) K(a) += 0.5 * cd(r(b)) * pd.B(a, b);
    }
    return K;
}

} // namespace detail

} // namespace hurwitz

#endif
