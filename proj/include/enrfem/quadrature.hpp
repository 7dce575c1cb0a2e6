#pragma once

#include "enrfem/geometry.hpp"

#include <array>
#include <vector>

namespace enrfem {

/// Quadrature on [0,1] against the weight t^alpha (1-t)^beta (alpha=beta=0
/// is plain Gauss-Legendre). The weight is absorbed into the weights, so
/// sum(weights) = B(alpha+1, beta+1).
struct Rule1D {
    std::vector<double> nodes;    // strictly inside (0,1)
    std::vector<double> weights;  // positive
    double alpha = 0.0;
    double beta = 0.0;

    double jacobi_weight(double t) const;  // t^alpha (1-t)^beta, 0^0 = 1

    /// Integral of f against the rule's weight.
    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

Rule1D gauss_legendre(int k);                            // 1 <= k <= 64
Rule1D gauss_jacobi(int k, double alpha, double beta);   // k >= 1, alpha,beta > -1

/// Symmetric/tensorized rule on a triangle in barycentric form. Weights are
/// normalized to sum to 1; the integral of f over element E is
/// |E| * sum_i w_i f(x(bary_i)).
struct RuleTri {
    std::vector<std::array<double, 3>> nodes;  // barycentric, strictly interior
    std::vector<double> weights;
    int degree = 0;

    template <class F>
    double integrate(const TriGeom& geom, F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& b = nodes[i];
            const Vec2 x = b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
            s += weights[i] * f(x);
        }
        return geom.area() * s;
    }
};

/// degree in {2, 5, 8, 11, 14, 20}: tabulated symmetric rules for 2 and 5,
/// a tensorized Duffy-transform rule above.
RuleTri triangle_rule(int degree);

/// Exact integral of lambda1^a lambda2^b lambda3^c over a triangle of unit
/// area: a! b! c! * 2 / (a+b+c+2)!.
double bary_monomial_integral(int a, int b, int c);

}  // namespace enrfem
