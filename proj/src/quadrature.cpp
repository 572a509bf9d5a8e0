#include "stokes/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace stokes {

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));  // root guess on [-1,1]
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (t + 1.0);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

QuadratureRule make_rule(int degree) {
    QuadratureRule r;
    r.exact_degree = degree;
    if (degree <= 1) {
        r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
        r.weights = {1.0};
        return r;
    }
    if (degree == 2) {
        r.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                    {1.0 / 6, 2.0 / 3, 1.0 / 6},
                    {1.0 / 6, 1.0 / 6, 2.0 / 3}};
        r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        return r;
    }
    // Collapsed tensor rule: x = s, y = t(1-s) maps the unit square onto the
    // reference triangle with Jacobian (1-s). The s-integrand carries an extra
    // factor, hence n = ceil((degree+2)/2) points in each direction.
    int n = (degree + 3) / 2;
    std::vector<double> gx, gw;
    gauss_legendre_01(n, gx, gw);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = gx[i], t = gx[j];
            double x = s, y = t * (1.0 - s);
            r.points.push_back({1.0 - x - y, x, y});
            r.weights.push_back(2.0 * gw[i] * gw[j] * (1.0 - s));
        }
    }
    return r;
}

}  // namespace

const QuadratureRule& quadrature_rule(int exact_degree) {
    if (exact_degree < 1 || exact_degree > 14)
        throw std::invalid_argument("quadrature_rule: degree " + std::to_string(exact_degree) +
                                    " unsupported, supported range is 1..14");
    static const std::vector<QuadratureRule> table = [] {
        std::vector<QuadratureRule> t;
        for (int d = 1; d <= 14; ++d) t.push_back(make_rule(d));
        return t;
    }();
    return table[exact_degree - 1];
}

}  // namespace stokes
