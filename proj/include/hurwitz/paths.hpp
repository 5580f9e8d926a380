#ifndef HURWITZ_PATHS_HPP
#define HURWITZ_PATHS_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hurwitz/curve.hpp"
#include "hurwitz/quadrature.hpp"

namespace hurwitz {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// One straight leg of an integration path in the lambda plane.  sqrt_at_a /
// sqrt_at_b mark branch-point endpoints (integrand ~ 1/sqrt there, handled
// by the t^2 substitution).  to_infinity legs run from a outward along
// direction dir.
struct Segment {
    cd a{0.0, 0.0};
    cd b{0.0, 0.0};
    bool sqrt_at_a = false;
    bool sqrt_at_b = false;
    bool to_infinity = false;
    cd dir{0.0, 0.0};  // only for to_infinity
};

using Path = std::vector<Segment>;

namespace detail {

// Recursive straight-segment router: detours to the left of the travel
// direction around cut endpoints, clearance 0.25 x local free distance.
inline void plan_segment(const CutLayout& layout, cd from, cd to,
                         std::vector<cd>& waypoints, int& budget, double eps) {
    if (budget-- <= 0) throw PathBlocked("detour budget exhausted");
    int hit = -1;
    double tmin = 2.0;
    for (int j = 0; j < static_cast<int>(layout.cuts.size()); ++j) {
        auto t = detail::segment_intersection(from, to, layout.cuts[j].a, layout.cuts[j].b, eps);
        if (t && *t < tmin) {
            tmin = *t;
            hit = j;
        }
    }
    if (hit < 0) {
        waypoints.push_back(to);
        return;
    }
    const Cut& c = layout.cuts[hit];
    cd x = from + tmin * (to - from);
    cd dirv = (to - from) / std::abs(to - from);
    // endpoint on the left of the travel direction; ties resolve to c.a
    auto crossz = [](cd u, cd v) { return u.real() * v.imag() - u.imag() * v.real(); };
    cd e = (crossz(dirv, c.a - x) >= 0.0) ? c.a : c.b;
    cd other = (e == c.a) ? c.b : c.a;
    double clearance = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(layout.cuts.size()); ++j) {
        if (j == hit) continue;
        clearance = std::min(clearance, detail::dist_point_segment(e, layout.cuts[j].a, layout.cuts[j].b));
    }
    clearance = std::min(clearance, std::abs(e - other));
    cd out = (e - other) / std::abs(e - other);
    cd w = e + 0.25 * clearance * out;
    plan_segment(layout, from, w, waypoints, budget, eps);
    plan_segment(layout, w, to, waypoints, budget, eps);
}

} // namespace detail

// Deterministic cut-avoiding polyline from one plane point to another.
inline std::vector<cd> plan_route(const CutLayout& layout, cd from, cd to, double eps) {
    std::vector<cd> pts{from};
    int budget = 64;
    detail::plan_segment(layout, from, to, pts, budget, eps);
    return pts;
}

namespace detail {

// Adaptive Gauss-Legendre on [lo, hi] for a parametrized integrand
// G(t) (already including the jacobian).
inline void adaptive_gl(const std::function<Vec(double)>& G, double lo, double hi,
                        int order, double abs_tol, int depth, Vec& out) {
    const QuadRule& gl = gauss_legendre(order);
    auto eval = [&](double a, double b) {
        Vec s = Vec::Zero(out.size());
        double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        for (size_t k = 0; k < gl.nodes.size(); ++k)
            s += (rad * gl.weights[k]) * G(mid + rad * gl.nodes[k]);
        return s;
    };
    Vec whole = eval(lo, hi);
    double m = 0.5 * (lo + hi);
    Vec split = eval(lo, m);
    split += eval(m, hi);
    double err = (whole - split).cwiseAbs().maxCoeff();
    if (err < abs_tol || depth <= 0) {
        out += split;
        return;
    }
    adaptive_gl(G, lo, m, order, 0.5 * abs_tol, depth - 1, out);
    adaptive_gl(G, m, hi, order, 0.5 * abs_tol, depth - 1, out);
}

} // namespace detail

struct PathQuad {
    int order = 16;
    double abs_tol = 1e-12;
    int max_depth = 13;
};

// Integral of a vector-valued integrand F(lambda) d lambda along a path.
// Branch-point endpoints use lambda = e + t^2 (b - e); infinity legs use
// lambda = a + dir * t/(1-t).
inline Vec integrate_path(const std::function<Vec(cd)>& F, const Path& path, int dim,
                          PathQuad q = {}) {
    Vec total = Vec::Zero(dim);
    for (const Segment& seg : path) {
        if (seg.to_infinity) {
            auto G = [&](double t) -> Vec {
                double om = 1.0 - t;
                cd lam = seg.a + seg.dir * (t / om);
                return (seg.dir / (om * om)) * F(lam);
            };
            detail::adaptive_gl(G, 0.0, 1.0, q.order, q.abs_tol, q.max_depth, total);
            continue;
        }
        auto add_piece = [&](cd e, cd c, bool sqrt_end, double sign) {
            if (sqrt_end) {
                auto G = [&](double t) -> Vec { return sign * (2.0 * t * (c - e)) * F(e + (t * t) * (c - e)); };
                detail::adaptive_gl(G, 0.0, 1.0, q.order, q.abs_tol, q.max_depth, total);
            } else {
                auto G = [&](double t) -> Vec { return sign * (c - e) * F(e + t * (c - e)); };
                detail::adaptive_gl(G, 0.0, 1.0, q.order, q.abs_tol, q.max_depth, total);
            }
        };
        if (seg.sqrt_at_a && seg.sqrt_at_b) {
            cd mid = 0.5 * (seg.a + seg.b);
            add_piece(seg.a, mid, true, +1.0);
            add_piece(seg.b, mid, true, -1.0);  // traversed b -> mid, orientation flipped
        } else if (seg.sqrt_at_b) {
            add_piece(seg.b, seg.a, true, -1.0);
        } else {
            add_piece(seg.a, seg.b, seg.sqrt_at_a, +1.0);
        }
    }
    return total;
}

// Build a Path from a polyline, flagging sqrt endpoints at the two ends.
inline Path path_from_polyline(const std::vector<cd>& pts, bool sqrt_start, bool sqrt_end) {
    Path p;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Segment s;
        s.a = pts[i];
        s.b = pts[i + 1];
        if (i == 0) s.sqrt_at_a = sqrt_start;
        if (i + 2 == pts.size()) s.sqrt_at_b = sqrt_end;
        p.push_back(s);
    }
    return p;
}

} // namespace hurwitz

#endif
