#ifndef HURWITZ_CURVE_HPP
#define HURWITZ_CURVE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "hurwitz/errors.hpp"

namespace hurwitz {

using cd = std::complex<double>;

// A branch cut: straight segment pairing two branch points.
struct Cut {
    cd a;    // first endpoint (lexicographically earlier)
    cd b;    // second endpoint
    cd mid() const { return 0.5 * (a + b); }
    cd half() const { return 0.5 * (b - a); }
};

enum class ChartKind { Generic, Branch, Infinity };

// A point of the two-sheeted covering w^2 = prod (lambda - lambda_m).
// Generic points carry (lambda, sheet).  Branch-chart points carry the
// chart coordinate x with lambda = lambda_m + x^2; Infinity-chart points
// carry zeta = 1/lambda and the sheet tag n (1 -> sheet +1, 2 -> sheet -1).
struct SurfacePoint {
    cd lambda{0.0, 0.0};
    int sheet = +1;             // +1 / -1
    ChartKind chart = ChartKind::Generic;
    int chart_index = 0;        // branch point index m, or infinity index n (1,2)
    cd chart_coord{0.0, 0.0};   // x_m or zeta

    static SurfacePoint generic(cd lam, int s) {
        SurfacePoint p;
        p.lambda = lam;
        p.sheet = s;
        return p;
    }
    static SurfacePoint branch(int m, cd x = cd(0.0, 0.0)) {
        SurfacePoint p;
        p.chart = ChartKind::Branch;
        p.chart_index = m;
        p.chart_coord = x;
        return p;
    }
    static SurfacePoint infinity(int n) {
        SurfacePoint p;
        p.chart = ChartKind::Infinity;
        p.chart_index = n;
        p.sheet = (n == 1) ? +1 : -1;
        p.chart_coord = cd(0.0, 0.0);
        return p;
    }
};

// Divisor of d(pi): the M ramification points with multiplicity +1 and the
// two points at infinity with multiplicity -2.
struct DivisorEntry {
    SurfacePoint point;
    int multiplicity;
};

struct Divisor {
    std::vector<DivisorEntry> entries;
    int degree() const {
        int d = 0;
        for (const auto& e : entries) d += e.multiplicity;
        return d;
    }
};

struct CurveOptions {
    double separation_floor_rel = 1e-6;  // times configuration diameter
    double on_cut_tol_rel = 1e-10;       // times configuration diameter
};

struct BranchConfig {
    std::vector<cd> points;  // lexicographically sorted by (Re, Im)
    int genus = 0;
    double scale = 1.0;      // diameter of the configuration
    CurveOptions options;

    int count() const { return static_cast<int>(points.size()); }
};

namespace detail {

inline double dist_point_segment(cd p, cd a, cd b) {
    cd d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p.real() - a.real()) * d.real() + (p.imag() - a.imag()) * d.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

// Proper intersection of open segments (p1,p2) and (q1,q2); endpoints within
// eps of the other segment's line are not counted.
inline std::optional<double> segment_intersection(cd p1, cd p2, cd q1, cd q2, double eps) {
    cd r = p2 - p1, s = q2 - q1;
    double denom = r.real() * s.imag() - r.imag() * s.real();
    cd qp = q1 - p1;
    double num_t = qp.real() * s.imag() - qp.imag() * s.real();
    double num_u = qp.real() * r.imag() - qp.imag() * r.real();
    if (std::abs(denom) < eps * std::abs(r) * std::abs(s)) return std::nullopt;
    double t = num_t / denom;
    double u = num_u / denom;
    double et = eps / std::max(std::abs(r), eps);
    double eu = eps / std::max(std::abs(s), eps);
    if (t > et && t < 1.0 - et && u > eu && u < 1.0 - eu) return t;
    return std::nullopt;
}

} // namespace detail

class CutLayout {
public:
    std::vector<Cut> cuts;  // g+1 disjoint segments

    int cut_of_branch_point(int m) const { return m / 2; }  // points 2j, 2j+1 share cut j

    // True only near the interior of a cut, where the sheet label is ambiguous.
    // Near a cut endpoint the root is continuous, so no exclusion is needed.
    bool on_any_cut(cd lambda, double tol) const {
        for (const auto& c : cuts) {
            if (detail::dist_point_segment(lambda, c.a, c.b) >= tol) continue;
            if (std::abs(lambda - c.a) >= 2.0 * tol && std::abs(lambda - c.b) >= 2.0 * tol)
                return true;
        }
        return false;
    }

    double distance_to_cuts(cd lambda) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : cuts)
            d = std::min(d, detail::dist_point_segment(lambda, c.a, c.b));
        return d;
    }

    double distance_to_cuts_except(cd lambda, int skip) const {
        double d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(cuts.size()); ++j) {
            if (j == skip) continue;
            d = std::min(d, detail::dist_point_segment(lambda, cuts[j].a, cuts[j].b));
        }
        return d;
    }
};

struct Curve {
    BranchConfig config;
    CutLayout layout;
    Divisor divisor;

    int genus() const { return config.genus; }
    double scale() const { return config.scale; }
    double on_cut_tol() const { return config.options.on_cut_tol_rel * config.scale; }

    double chart_radius(int m) const {
        double d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < config.count(); ++j)
            if (j != m) d = std::min(d, std::abs(config.points[j] - config.points[m]));
        return 0.5 * d;
    }

    double infinity_radius() const {
        double r = 0.0;
        for (const auto& p : config.points) r = std::max(r, std::abs(p));
        return 2.0 * r;
    }

    // The square root sqrt((lambda-a)(lambda-b)) with branch cut exactly on
    // the segment [a,b], ~ (lambda - mid) at large lambda.
    static cd pair_root(const Cut& c, cd lambda) {
        cd h = c.half();
        cd u = (lambda - c.mid()) / h;
        return h * std::sqrt(u - 1.0) * std::sqrt(u + 1.0);
    }

    // nu on sheet +1: continuous off the cuts, nu ~ +lambda^{g+1} on the
    // positive real axis beyond all cuts.
    cd nu_plus(cd lambda) const {
        cd v(1.0, 0.0);
        for (const auto& c : layout.cuts) v *= pair_root(c, lambda);
        return v;
    }

    cd nu(cd lambda, int sheet) const {
        if (layout.on_any_cut(lambda, on_cut_tol()))
            throw OnCut("lambda lies on a branch cut");
        return static_cast<double>(sheet) * nu_plus(lambda);
    }

    cd nu(const SurfacePoint& p) const {
        if (p.chart == ChartKind::Generic) return nu(p.lambda, p.sheet);
        if (p.chart == ChartKind::Branch) {
            // chart value: nu = x * s_m(x^2), see branch_root_factor
            cd x = p.chart_coord;
            return x * branch_root_factor(p.chart_index, x * x);
        }
        // infinity chart
        cd lam = 1.0 / p.chart_coord;
        return nu(lam, p.sheet);
    }

    // s_m(u) with s_m(u)^2 = prod_{j != m} (lambda_m + u - lambda_j), the branch
    // continued from the deterministic chart orientation at u = 0.
    cd branch_root_factor(int m, cd u) const {
        cd prod0(1.0, 0.0), prod(1.0, 0.0);
        for (int j = 0; j < config.count(); ++j) {
            if (j == m) continue;
            prod0 *= config.points[m] - config.points[j];
            prod *= config.points[m] + u - config.points[j];
        }
        // principal-square-root ratio stays near 1 for |u| within the chart
        return branch_root_at_zero(m) * std::sqrt(prod / prod0);
    }

    // s_m(0), sign fixed so that the chart coordinate x = principal
    // sqrt(lambda - lambda_m) along the outward probe direction lies on
    // sheet +1.
    cd branch_root_at_zero(int m) const {
        cd prod0(1.0, 0.0);
        for (int j = 0; j < config.count(); ++j)
            if (j != m) prod0 *= config.points[m] - config.points[j];
        cd root = std::sqrt(prod0);
        cd probe = branch_probe(m);
        cd x = std::sqrt(probe - config.points[m]);
        cd nu_probe = nu_plus(probe);
        // pick the sign matching nu(sheet +1) = x * s_m near the point
        if (std::abs(nu_probe - x * root) > std::abs(nu_probe + x * root)) root = -root;
        return root;
    }

    // Deterministic off-cut probe point just outside branch point m.
    cd branch_probe(int m) const {
        int j = layout.cut_of_branch_point(m);
        const Cut& c = layout.cuts[j];
        cd partner = (std::abs(c.a - config.points[m]) < std::abs(c.b - config.points[m])) ? c.b : c.a;
        cd dir = (config.points[m] - partner);
        dir /= std::abs(dir);
        double delta = 1e-3 * chart_radius(m);
        return config.points[m] + delta * dir;
    }

    // Resolve a surface point to (lambda, sheet) form; branch-chart points at
    // x == 0 are the ramification points themselves (sheet tag meaningless).
    std::pair<cd, int> resolve(const SurfacePoint& p) const {
        switch (p.chart) {
            case ChartKind::Generic:
                return {p.lambda, p.sheet};
            case ChartKind::Branch: {
                cd x = p.chart_coord;
                cd lam = config.points[p.chart_index] + x * x;
                if (std::abs(x) < 1e-14 * scale()) return {lam, +1};
                cd nu_chart = x * branch_root_factor(p.chart_index, x * x);
                cd nu_p = nu_plus(lam);
                int s = (std::abs(nu_chart - nu_p) <= std::abs(nu_chart + nu_p)) ? +1 : -1;
                return {lam, s};
            }
            case ChartKind::Infinity:
            default:
                return {1.0 / p.chart_coord, p.sheet};
        }
    }

    void check_chart(const SurfacePoint& p) const {
        if (p.chart == ChartKind::Branch) {
            // |lambda - lambda_m| = |x|^2 must stay within the injectivity radius
            if (std::norm(p.chart_coord) > chart_radius(p.chart_index))
                throw ChartOutOfRange("branch chart coordinate beyond injectivity radius");
        } else if (p.chart == ChartKind::Infinity) {
            if (p.chart_coord != cd(0.0, 0.0) && std::abs(1.0 / p.chart_coord) <= infinity_radius())
                throw ChartOutOfRange("infinity chart usable only for |lambda| > 2 max|lambda_m|");
        }
    }

    // dlambda/dx_k, d^2 lambda/dx_k^2, ... at a divisor-chart point.
    std::vector<cd> chart_jacobians(const SurfacePoint& p, int order) const {
        check_chart(p);
        std::vector<cd> out(order, cd(0.0, 0.0));
        if (p.chart == ChartKind::Branch) {
            cd x = p.chart_coord;
            if (order >= 1) out[0] = 2.0 * x;
            if (order >= 2) out[1] = cd(2.0, 0.0);
            return out;
        }
        if (p.chart == ChartKind::Infinity) {
            cd z = p.chart_coord;
            if (z == cd(0.0, 0.0))
                throw ChartOutOfRange("jacobian of lambda = 1/zeta diverges at zeta = 0");
            cd zp = 1.0;
            double fact = 1.0;
            for (int k = 1; k <= order; ++k) {
                zp *= z;
                fact *= k;
                out[k - 1] = ((k % 2 == 0) ? 1.0 : -1.0) * fact / (zp * z);
            }
            return out;
        }
        throw ChartOutOfRange("generic chart has trivial jacobians");
    }
};

inline Curve build_curve(std::vector<cd> branch_points, CurveOptions options = {}) {
    const int M = static_cast<int>(branch_points.size());
    if (M < 4 || M % 2 != 0)
        throw OddBranchCount("need an even number (>= 4) of branch points, got " + std::to_string(M));

    std::sort(branch_points.begin(), branch_points.end(), [](cd x, cd y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    double diam = 0.0;
    double minsep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
            double d = std::abs(branch_points[i] - branch_points[j]);
            diam = std::max(diam, d);
            minsep = std::min(minsep, d);
        }
    if (minsep == 0.0) throw DuplicatePoints("branch points must be pairwise distinct");
    if (minsep < options.separation_floor_rel * diam)
        throw DegenerateSeparation("minimum separation below floor");

    Curve curve;
    curve.config.points = branch_points;
    curve.config.genus = M / 2 - 1;
    curve.config.scale = diam;
    curve.config.options = options;

    for (int j = 0; j + 1 < M; j += 2)
        curve.layout.cuts.push_back(Cut{branch_points[j], branch_points[j + 1]});

    for (int m = 0; m < M; ++m)
        curve.divisor.entries.push_back({SurfacePoint::branch(m), +1});
    curve.divisor.entries.push_back({SurfacePoint::infinity(1), -2});
    curve.divisor.entries.push_back({SurfacePoint::infinity(2), -2});
    return curve;
}

} // namespace hurwitz

#endif
