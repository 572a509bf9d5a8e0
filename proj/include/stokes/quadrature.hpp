#pragma once

#include <array>
#include <vector>

namespace stokes {

/// Quadrature rule on the triangle in barycentric coordinates. Weights are
/// normalized to sum to one; an integral over a triangle T is
/// |T| * sum_i w_i f(p_i). All points are interior and all weights positive.
struct QuadratureRule {
    int exact_degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

/// Rule exact for all polynomials of total degree <= exact_degree,
/// 1 <= exact_degree <= 14. Deterministic: the same degree always yields the
/// same rule. Degrees 1 and 2 use the classic symmetric rules; higher degrees
/// use a collapsed tensor Gauss rule.
const QuadratureRule& quadrature_rule(int exact_degree);

template <class F>
double integrate(const QuadratureRule& rule, double area, F&& f) {
    double sum = 0.0;
    for (size_t i = 0; i < rule.points.size(); ++i) {
        const auto& p = rule.points[i];
        sum += rule.weights[i] * f(p[0], p[1], p[2]);
    }
    return area * sum;
}

}  // namespace stokes
