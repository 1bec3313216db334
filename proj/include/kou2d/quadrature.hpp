#pragma once

#include <vector>

namespace kou2d {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule computed by Newton iteration on P_n; cached per n.
const GaussRule& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point rule.
template <typename F>
double gauss_integrate(F&& f, double a, double b, int n = 16) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

}  // namespace kou2d
