#ifndef HURWITZ_QUADRATURE_HPP
#define HURWITZ_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

namespace hurwitz {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1]; nodes by Newton iteration on P_n.
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Gauss-Chebyshev (first kind): integrates f(t)/sqrt(1-t^2) on [-1,1]
// as (pi/n) * sum f(t_k).  The weight matches the inverse-square-root
// behaviour of hyperelliptic integrands at cut endpoints.
inline const QuadRule& gauss_chebyshev(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = std::cos(pi * (2.0 * k + 1.0) / (2.0 * n));
        rule.weights[k] = pi / n;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

} // namespace hurwitz

#endif
