#pragma once

#include "enrfem/enrichment.hpp"

#include <span>

namespace enrfem {

/// Vertex-interpolating linear projection of g on one element.
struct LinearProjection {
    std::array<double, 3> coeff;  // vertex values
    const TriGeom* geom;

    double value(const Vec2& x) const {
        const auto lam = geom->bary(x);
        return coeff[0] * lam[0] + coeff[1] * lam[1] + coeff[2] * lam[2];
    }
    Vec2 gradient() const {
        return coeff[0] * geom->grad_bary(0) + coeff[1] * geom->grad_bary(1) +
               coeff[2] * geom->grad_bary(2);
    }
};

LinearProjection project_linear(const TriGeom& geom, const ScalarField& g);

/// Enriched projection: vertex values carried by phi_0..phi_2, edge averages
/// by phi_3..phi_5.
struct EnrichedProjection {
    std::array<double, 6> coeff;
    const ElementBasis* basis;

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
};

EnrichedProjection project_enriched(const ElementBasis& basis, const ScalarField& g,
                                    const Rule1D& edge_rule);

/// Max over the samples of the defect in the identity
///   err_enr[g] = err_lin[g] + sum_l <enrichment, inv column l> * D_l(g)
/// with D_l(g) = (1/2) sum_{i != l} g(v_i) - edge_average_l(g).
/// Requires a vertex-vanishing family; the value measures quadrature error only.
double error_decomposition_residual(const ElementBasis& basis, const ScalarField& g,
                                    const Rule1D& edge_rule, std::span<const Vec2> samples);

/// Explicit constants of the L2 interpolation bound C * h^2.
struct BoundConstants {
    double factor_bound = 0.0;        // K: sup of |f_l| on [0,1] over the six factors
    double edge_integral_bound = 0.0; // H: max_i 1 / |int w_{a,b}(t) f_{2i}(t) f_{2i+1}(1-t) dt|
    double grad_lipschitz = 0.0;      // L: Lipschitz constant of grad g (sampled Hessian norm)
    double constant = 0.0;            // C = (L/8) (1 + 9 (mu+1) K^2 H / 2) sqrt(|domain|)
    double domain_area = 1.0;
};

/// K by dense sampling (2001 points), H by Gauss-Jacobi quadrature, L by
/// sampling the Hessian spectral norm of g on a grid over [0,1]^2.
/// Throws when an edge integral vanishes (H infinite).
BoundConstants bound_constants(const EnrichmentFamily& family, const ScalarField& g,
                               double domain_area = 1.0, int hessian_grid = 101);

/// L(grad g) alone, for callers that supply their own analytic value elsewhere.
double sampled_grad_lipschitz(const ScalarField& g, int grid = 101);

struct OptimizeResult {
    double mu = 0.0, alpha = 0.0, beta = 0.0;  // argmin over the simplex mu+alpha+beta = 1
    double c_min = 0.0;
    double c_alpha_endpoint = 0.0;  // C at (0,1,0)
    double c_beta_endpoint = 0.0;   // C at (0,0,1)
    bool tie = false;               // endpoints equal within 1e-10 relative
    bool matches_theory = false;    // argmin agrees with the closed-form endpoint rule
};

/// Brute-force grid search of the bound constant for the power-pair family
/// over {mu + alpha + beta = 1, all >= 0}. The Lipschitz and domain factors
/// are common to all grid points and are dropped.
OptimizeResult optimize_parameters(double alpha1, double beta1, double step = 0.01);

}  // namespace enrfem
