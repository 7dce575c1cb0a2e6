#include "enrfem/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace enrfem {

LinearProjection project_linear(const TriGeom& geom, const ScalarField& g) {
    return {vertex_values(geom, g), &geom};
}

double EnrichedProjection::value(const Vec2& x) const {
    std::array<double, 6> phi;
    basis->eval(x, &phi, nullptr);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += coeff[i] * phi[i];
    return s;
}

Vec2 EnrichedProjection::gradient(const Vec2& x) const {
    std::array<Vec2, 6> dphi;
    basis->eval(x, nullptr, &dphi);
    Vec2 s = Vec2::Zero();
    for (int i = 0; i < 6; ++i) s += coeff[i] * dphi[i];
    return s;
}

EnrichedProjection project_enriched(const ElementBasis& basis, const ScalarField& g,
                                    const Rule1D& edge_rule) {
    EnrichedProjection p;
    p.basis = &basis;
    const auto vv = vertex_values(basis.geom(), g);
    for (int i = 0; i < 3; ++i) {
        p.coeff[i] = vv[i];
        p.coeff[3 + i] = edge_average(basis.geom(), i, g, edge_rule);
    }
    return p;
}

double error_decomposition_residual(const ElementBasis& basis, const ScalarField& g,
                                    const Rule1D& edge_rule, std::span<const Vec2> samples) {
    if (!basis.functionals().vanishing)
        throw std::invalid_argument(
            "error_decomposition_residual: requires a vertex-vanishing family");
    const TriGeom& geom = basis.geom();
    const auto lin = project_linear(geom, g);
    const auto enr = project_enriched(basis, g, edge_rule);
    const auto vv = vertex_values(geom, g);

    std::array<double, 3> defect;  // D_l(g) = (1/2) sum_{i != l} g(v_i) - edge average l
    for (int l = 0; l < 3; ++l)
        defect[l] = 0.5 * (vv[cyc3(l + 1)] + vv[cyc3(l + 2)]) -
                    edge_average(geom, l, g, edge_rule);

    double worst = 0.0;
    for (const Vec2& x : samples) {
        const double lhs = g(x) - enr.value(x);
        const auto ev = basis.family().values(geom, x, basis.flips());
        double extra = 0.0;
        for (int l = 0; l < 3; ++l) {
            double dot = 0.0;
            for (int m = 0; m < 3; ++m) dot += basis.inverse()(m, l) * ev[m];
            extra += dot * defect[l];
        }
        const double rhs = (g(x) - lin.value(x)) + extra;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double sampled_grad_lipschitz(const ScalarField& g, int grid) {
    const double step = 1e-4;
    double worst = 0.0;
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            const double x = double(i) / (grid - 1), y = double(j) / (grid - 1);
            // central differences clipped to the domain near the boundary
            const double xc = std::min(std::max(x, step), 1.0 - step);
            const double yc = std::min(std::max(y, step), 1.0 - step);
            const auto f = [&](double a, double b) { return g(Vec2(a, b)); };
            const double fxx =
                (f(xc + step, yc) - 2.0 * f(xc, yc) + f(xc - step, yc)) / (step * step);
            const double fyy =
                (f(xc, yc + step) - 2.0 * f(xc, yc) + f(xc, yc - step)) / (step * step);
            const double fxy = (f(xc + step, yc + step) - f(xc + step, yc - step) -
                                f(xc - step, yc + step) + f(xc - step, yc - step)) /
                               (4.0 * step * step);
            // spectral norm of the symmetric 2x2 Hessian
            const double tr = 0.5 * (fxx + fyy);
            const double det = std::sqrt(0.25 * (fxx - fyy) * (fxx - fyy) + fxy * fxy);
            worst = std::max(worst, std::max(std::abs(tr + det), std::abs(tr - det)));
        }
    }
    return worst;
}

BoundConstants bound_constants(const EnrichmentFamily& family, const ScalarField& g,
                               double domain_area, int hessian_grid) {
    if (family.kind() != EnrichmentFamily::Kind::PairProduct)
        throw std::invalid_argument("bound_constants: defined for the factor-pair families");
    BoundConstants bc;
    bc.domain_area = domain_area;

    const auto& factors = family.pair_factors();
    for (const auto& fac : factors)
        for (int i = 0; i <= 2000; ++i)
            bc.factor_bound = std::max(bc.factor_bound, std::abs(fac.f(double(i) / 2000.0)));

    const WeightParams& wp = family.weight_params();
    const Rule1D rule = gauss_jacobi(32, wp.alpha, wp.beta);
    const double tiny = 1e-13 * std::max(1.0, bc.factor_bound * bc.factor_bound);
    for (int i = 0; i < 3; ++i) {
        const double integral =
            rule.integrate([&](double t) { return factors[2 * i].f(t) * factors[2 * i + 1].f(1.0 - t); });
        if (std::abs(integral) < tiny)
            throw std::runtime_error("bound_constants: vanishing edge integral, bound is infinite");
        bc.edge_integral_bound = std::max(bc.edge_integral_bound, 1.0 / std::abs(integral));
    }

    bc.grad_lipschitz = sampled_grad_lipschitz(g, hessian_grid);
    bc.constant = bc.grad_lipschitz / 8.0 *
                  (1.0 + 4.5 * (wp.mu + 1.0) * bc.factor_bound * bc.factor_bound *
                             bc.edge_integral_bound) *
                  std::sqrt(domain_area);
    return bc;
}

OptimizeResult optimize_parameters(double alpha1, double beta1, double step) {
    if (!(alpha1 >= 0.0) || !(beta1 >= 0.0))
        throw std::invalid_argument("optimize_parameters: alpha1 and beta1 must be >= 0");
    if (!(step > 0.0) || step > 0.01 + 1e-15)
        throw std::invalid_argument("optimize_parameters: step must be in (0, 0.01]");

    const int n = static_cast<int>(std::round(1.0 / step));
    // C up to the common positive Lipschitz/domain factors; K = 1 for powers
    // with nonnegative exponents on [0,1].
    const auto bound = [&](double mu, double alpha, double beta) {
        const Rule1D rule = gauss_jacobi(32, alpha, beta);
        const double integral = rule.integrate(
            [&](double t) { return std::pow(t, alpha1) * std::pow(1.0 - t, beta1); });
        return 1.0 + 4.5 * (mu + 1.0) / integral;
    };

    OptimizeResult res;
    res.c_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
            const double mu = double(i) / n, alpha = double(j) / n;
            const double beta = double(n - i - j) / n;
            const double c = bound(mu, alpha, beta);
            if (c < res.c_min) {
                res.c_min = c;
                res.mu = mu;
                res.alpha = alpha;
                res.beta = beta;
            }
        }
    }
    res.c_alpha_endpoint = bound(0.0, 1.0, 0.0);
    res.c_beta_endpoint = bound(0.0, 0.0, 1.0);
    res.tie = std::abs(res.c_alpha_endpoint - res.c_beta_endpoint) <=
              1e-10 * std::max(res.c_alpha_endpoint, res.c_beta_endpoint);
    const bool alpha_side = res.mu == 0.0 && res.alpha == 1.0 && res.beta == 0.0;
    const bool beta_side = res.mu == 0.0 && res.alpha == 0.0 && res.beta == 1.0;
    res.matches_theory = (alpha1 >= beta1 && alpha_side) || (beta1 >= alpha1 && beta_side) ||
                         (res.tie && (alpha_side || beta_side));
    return res;
}

}  // namespace enrfem
