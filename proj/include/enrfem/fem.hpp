#pragma once

#include "enrfem/enrichment.hpp"
#include "enrfem/mesh.hpp"
#include "enrfem/quadrature.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <optional>
#include <vector>

namespace enrfem {

enum class Exec { Serial, Parallel };

enum class ElementKind { Linear, Enriched };

/// Global numbering of the free degrees of freedom under homogeneous
/// Dirichlet elimination: boundary vertices and boundary edges map to -1.
/// Interior vertices come first, then interior edges (enriched only).
struct DofMap {
    ElementKind kind = ElementKind::Linear;
    std::vector<int> vertex_dof;
    std::vector<int> edge_dof;
    int n_dofs = 0;
};

DofMap build_dof_map(const TriMesh& mesh, ElementKind kind);

struct SparseSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    bool symmetric = true;
};

/// Per-element enriched bases over a whole mesh, with the canonical edge
/// orientations baked in. Construction is independent per element and runs
/// in parallel; results do not depend on the thread count.
class EnrichedSpace {
public:
    EnrichedSpace(const TriMesh& mesh, EnrichmentFamily family, Rule1D edge_rule,
                  Exec policy = Exec::Parallel);

    const ElementBasis& basis(int t) const { return *bases_[t]; }
    const EnrichmentFamily& family() const { return family_; }
    const TriMesh& mesh() const { return *mesh_; }
    const Rule1D& edge_rule() const { return edge_rule_; }

private:
    const TriMesh* mesh_;
    EnrichmentFamily family_;
    Rule1D edge_rule_;
    std::vector<std::optional<ElementBasis>> bases_;
};

/// Stiffness and load by element-wise quadrature. Element contributions are
/// computed independently (in parallel under Exec::Parallel) and accumulated
/// serially in element order, so the result is bit-identical across policies
/// and thread counts.
SparseSystem assemble(const TriMesh& mesh, const DofMap& dofs, const ScalarField& f,
                      const RuleTri& rule, Exec policy = Exec::Parallel);
SparseSystem assemble(const EnrichedSpace& space, const DofMap& dofs, const ScalarField& f,
                      const RuleTri& rule, Exec policy = Exec::Parallel);

/// Load vector alone (the stiffness does not depend on the source term).
Eigen::VectorXd assemble_load(const TriMesh& mesh, const DofMap& dofs, const ScalarField& f,
                              const RuleTri& rule, Exec policy = Exec::Parallel);
Eigen::VectorXd assemble_load(const EnrichedSpace& space, const DofMap& dofs, const ScalarField& f,
                              const RuleTri& rule, Exec policy = Exec::Parallel);

struct SolveResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double residual = 0.0;
    const char* method = "";
};

/// Dense Cholesky for n <= 2000, otherwise Jacobi-preconditioned conjugate
/// gradients to a relative residual <= tol.
SolveResult solve(const SparseSystem& system, double tol = 1e-12);
SolveResult solve_dense(const SparseSystem& system);
SolveResult solve_cg(const SparseSystem& system, double tol = 1e-12);

/// 2-norm condition number of the eliminated SPD matrix: dense eigensolve for
/// n <= 2000, else power iteration for the largest and inverse iteration (via
/// sparse Cholesky) for the smallest eigenvalue, both stopped at an
/// eigen-residual of 1e-6 relative.
double condition_number(const SparseSystem& system, double tol = 1e-6);

/// Local (element, local dof) -> global dof, -1 for eliminated entries.
/// Vertices occupy slots 0..2; the enriched element adds edges in 3..5.
std::array<int, 6> element_dofs(const TriMesh& mesh, const DofMap& dofs, int t);

}  // namespace enrfem
