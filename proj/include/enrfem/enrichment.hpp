#pragma once

#include "enrfem/geometry.hpp"
#include "enrfem/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace enrfem {

/// Parameters of the weight function
///   w(x) = sum_j (1 - l_j)^mu * l_{j+1}^alpha * l_{j+2}^beta
/// over the barycentric coordinates l_j, with the 0^0 = 1 convention.
/// Families buildable into element bases additionally require alpha,beta >= 0
/// (the literal weight is unbounded near edges for negative exponents).
struct WeightParams {
    double mu = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    void validate() const;
    bool nonnegative() const { return alpha >= 0.0 && beta >= 0.0; }
};

double weight(const WeightParams& p, const TriGeom& geom, const Vec2& x);
Vec2 weight_gradient(const WeightParams& p, const TriGeom& geom, const Vec2& x);

/// 1D factor on [0,1] with its derivative.
struct Factor {
    std::function<double(double)> f;
    std::function<double(double)> df;
};

enum class FamilyId { E3, E4, E8, E10, E11, E12, E13, E14, E15, W1, Custom };

std::string family_name(FamilyId id);
FamilyId family_from_name(const std::string& name);

/// Extra per-family parameters (exponents) on top of the weight.
struct FamilyParams {
    WeightParams weight;
    double alpha1 = 1.0;   // first exponent of the power-pair family
    double beta1 = 1.0;    // second exponent of the power-pair family
    double exponent = 2.0; // exponent of the power / coordinate-product families
};

/// A triple of per-element enrichment functions with value and gradient
/// evaluation. Three structural kinds cover the catalog:
///  - PairProduct:  w(x) * f_{2k}(l_{k+1}) * f_{2k+1}(l_{k+2})   (edge-attached)
///  - SelfProduct:  w(x) * prod_l f_l(l_k)                        (vertex-attached)
///  - CoordProduct: g_k(l_k) * prod_{m != k} l_m^{p-1}            (unweighted catalog)
///
/// PairProduct evaluation honors per-edge orientation flips: a flipped edge
/// swaps the factor pair and the (alpha, beta) exponents so the trace seen
/// from either side of a shared mesh edge is the same function of the
/// canonical edge parameter.
class EnrichmentFamily {
public:
    enum class Kind { PairProduct, SelfProduct, CoordProduct };

    static EnrichmentFamily preset(FamilyId id, const FamilyParams& params = {});
    static EnrichmentFamily pair_product(const WeightParams& w, std::array<Factor, 6> factors,
                                         std::string name = "CUSTOM");
    static EnrichmentFamily self_product(const WeightParams& w, std::vector<Factor> factors,
                                         std::string name = "CUSTOM");
    static EnrichmentFamily coord_product(std::array<Factor, 3> g, double exponent,
                                          std::string name = "CUSTOM");

    /// Same family with every function multiplied by c.
    EnrichmentFamily scaled(double c) const;

    std::array<double, 3> values(const TriGeom& geom, const Vec2& x,
                                 const std::array<bool, 3>& flip = {}) const;
    std::array<Vec2, 3> gradients(const TriGeom& geom, const Vec2& x,
                                  const std::array<bool, 3>& flip = {}) const;

    Kind kind() const { return kind_; }
    FamilyId id() const { return id_; }
    const std::string& name() const { return name_; }
    const WeightParams& weight_params() const { return weight_; }
    const std::array<Factor, 6>& pair_factors() const { return pair_; }

    bool vanishes_at_vertices() const { return vanishes_at_vertices_; }
    bool edge_localized() const { return edge_localized_; }
    bool trace_symmetric() const { return trace_symmetric_; }

private:
    EnrichmentFamily() = default;
    void classify();

    Kind kind_ = Kind::PairProduct;
    FamilyId id_ = FamilyId::Custom;
    std::string name_ = "CUSTOM";
    WeightParams weight_;
    std::array<Factor, 6> pair_{};    // PairProduct: function k uses factors 2k, 2k+1
    std::vector<Factor> self_;        // SelfProduct
    std::array<Factor, 3> coord_{};   // CoordProduct outer functions
    double coord_exponent_ = 1.0;
    double scale_ = 1.0;
    bool vanishes_at_vertices_ = false;
    bool edge_localized_ = false;
    bool trace_symmetric_ = false;
};

/// Normalized edge average (1/|e_j|) int_{e_j} g. With a Gauss-Jacobi rule the
/// endpoint weight is divided back out of g, so integrable endpoint
/// singularities of the form t^alpha (1-t)^beta are absorbed exactly.
double edge_average(const TriGeom& geom, int edge, const ScalarField& g, const Rule1D& rule,
                    bool flip = false);

/// The 3x3 matrix of enriched edge functionals applied to the enrichment
/// functions (rows: functionals, columns: functions), its kernel test, and
/// the data needed for the general basis formula.
struct FunctionalMatrix {
    Eigen::Matrix3d mat = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d vertex_values = Eigen::Matrix3d::Zero();  // (m, r): function m at vertex r
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double raw_scale = 0.0;   // magnitude of the functionals before cancellation
    bool vanishing = false;   // vertex values all zero: direct edge-average entries
    bool admissible = false;  // kernel test at ratio 1e-12

    double kernel_ratio() const { return sigma_max > 0.0 ? sigma_min / sigma_max : 0.0; }
};

FunctionalMatrix functional_matrix(const EnrichmentFamily& family, const TriGeom& geom,
                                   const Rule1D& edge_rule, const std::array<bool, 3>& flip = {});

/// The admissible enriched basis phi_0..phi_5 of one element: phi_0..phi_2
/// take the vertex values, phi_3..phi_5 the edge averages, with the full
/// Kronecker bi-orthogonality between the two functional sets.
class ElementBasis {
public:
    /// Throws std::runtime_error when the functional matrix is singular.
    /// The basis keeps its own copy of the family.
    ElementBasis(EnrichmentFamily family, const TriGeom& geom, const Rule1D& edge_rule,
                 const std::array<bool, 3>& flip = {});

    double value(int i, const Vec2& x) const;
    Vec2 gradient(int i, const Vec2& x) const;
    void eval(const Vec2& x, std::array<double, 6>* values, std::array<Vec2, 6>* gradients) const;

    const TriGeom& geom() const { return geom_; }
    const EnrichmentFamily& family() const { return family_; }
    const FunctionalMatrix& functionals() const { return fm_; }
    const Eigen::Matrix3d& inverse() const { return inv_; }
    const std::array<bool, 3>& flips() const { return flip_; }
    double condition() const { return fm_.sigma_max / fm_.sigma_min; }

private:
    EnrichmentFamily family_;
    TriGeom geom_;
    std::array<bool, 3> flip_;
    FunctionalMatrix fm_;
    Eigen::Matrix3d inv_;
};

}  // namespace enrfem
