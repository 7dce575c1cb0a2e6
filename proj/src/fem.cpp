#include "enrfem/fem.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace enrfem {

DofMap build_dof_map(const TriMesh& mesh, ElementKind kind) {
    DofMap dofs;
    dofs.kind = kind;
    dofs.vertex_dof.assign(mesh.n_vertices(), -1);
    dofs.edge_dof.assign(mesh.n_edges(), -1);
    int next = 0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (!mesh.boundary_vertex[v]) dofs.vertex_dof[v] = next++;
    if (kind == ElementKind::Enriched)
        for (int e = 0; e < mesh.n_edges(); ++e)
            if (!mesh.edges[e].boundary) dofs.edge_dof[e] = next++;
    dofs.n_dofs = next;
    return dofs;
}

std::array<int, 6> element_dofs(const TriMesh& mesh, const DofMap& dofs, int t) {
    std::array<int, 6> out{-1, -1, -1, -1, -1, -1};
    for (int k = 0; k < 3; ++k) {
        out[k] = dofs.vertex_dof[mesh.triangles[t][k]];
        if (dofs.kind == ElementKind::Enriched) out[3 + k] = dofs.edge_dof[mesh.tri_edges[t][k]];
    }
    return out;
}

EnrichedSpace::EnrichedSpace(const TriMesh& mesh, EnrichmentFamily family, Rule1D edge_rule,
                             Exec policy)
    : mesh_(&mesh), family_(std::move(family)), edge_rule_(std::move(edge_rule)) {
    const int nt = mesh.n_triangles();
    bases_.resize(nt);
    int bad = -1;
    const auto build = [&](int t) {
        try {
            bases_[t].emplace(family_, mesh.geom(t), edge_rule_, mesh.edge_flips(t));
        } catch (const std::exception&) {
#pragma omp critical
            if (bad < 0 || t < bad) bad = t;
        }
    };
    if (policy == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t) build(t);
    } else {
        for (int t = 0; t < nt; ++t) build(t);
    }
    if (bad >= 0)
        throw std::runtime_error("EnrichedSpace: family '" + family_.name() +
                                 "' not admissible on element " + std::to_string(bad));
}

namespace {

struct LocalContribution {
    std::array<int, 6> dof{};
    std::array<std::array<double, 6>, 6> mat{};
    std::array<double, 6> load{};
    int n = 0;
};

LocalContribution local_linear(const TriMesh& mesh, const DofMap& dofs, int t,
                               const ScalarField& f, const RuleTri& rule) {
    LocalContribution c;
    c.n = 3;
    c.dof = element_dofs(mesh, dofs, t);
    const TriGeom geom = mesh.geom(t);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const auto& b = rule.nodes[q];
        const Vec2 x = b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
        const double w = rule.weights[q] * geom.area();
        const double fv = f(x);
        for (int a = 0; a < 3; ++a) {
            c.load[a] += w * fv * b[a];  // lambda_a at a barycentric node is its coordinate
            for (int bb = 0; bb < 3; ++bb)
                c.mat[a][bb] += w * geom.grad_bary(a).dot(geom.grad_bary(bb));
        }
    }
    return c;
}

LocalContribution local_enriched(const EnrichedSpace& space, const DofMap& dofs, int t,
                                 const ScalarField& f, const RuleTri& rule) {
    LocalContribution c;
    c.n = 6;
    c.dof = element_dofs(space.mesh(), dofs, t);
    const ElementBasis& basis = space.basis(t);
    const TriGeom& geom = basis.geom();
    std::array<double, 6> phi;
    std::array<Vec2, 6> dphi;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const auto& b = rule.nodes[q];
        const Vec2 x = b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
        const double w = rule.weights[q] * geom.area();
        basis.eval(x, &phi, &dphi);
        const double fv = f(x);
        for (int a = 0; a < 6; ++a) {
            c.load[a] += w * fv * phi[a];
            for (int bb = 0; bb <= a; ++bb) c.mat[a][bb] += w * dphi[a].dot(dphi[bb]);
        }
    }
    for (int a = 0; a < 6; ++a)
        for (int bb = a + 1; bb < 6; ++bb) c.mat[a][bb] = c.mat[bb][a];
    return c;
}

// Runs the per-element kernel under the chosen policy; exceptions from worker
// threads are captured and rethrown on the caller's thread.
template <class Fn>
void for_each_element(int nt, Exec policy, Fn&& fn) {
    std::exception_ptr error;
    if (policy == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t) {
            try {
                fn(t);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
    } else {
        for (int t = 0; t < nt; ++t) fn(t);
    }
    if (error) std::rethrow_exception(error);
}

template <class LocalFn>
SparseSystem assemble_impl(int nt, int n_dofs, LocalFn&& local, Exec policy) {
    std::vector<LocalContribution> contribs(nt);
    for_each_element(nt, policy, [&](int t) { contribs[t] = local(t); });

    SparseSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n_dofs);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nt) * 36);
    for (const auto& c : contribs) {
        for (int a = 0; a < c.n; ++a) {
            if (c.dof[a] < 0) continue;
            sys.rhs[c.dof[a]] += c.load[a];
            for (int b = 0; b < c.n; ++b)
                if (c.dof[b] >= 0) triplets.emplace_back(c.dof[a], c.dof[b], c.mat[a][b]);
        }
    }
    sys.matrix.resize(n_dofs, n_dofs);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

void check_rule(const RuleTri& rule) {
    if (rule.degree < 2) throw std::invalid_argument("assemble: quadrature degree must be >= 2");
}

}  // namespace

SparseSystem assemble(const TriMesh& mesh, const DofMap& dofs, const ScalarField& f,
                      const RuleTri& rule, Exec policy) {
    check_rule(rule);
    return assemble_impl(
        mesh.n_triangles(), dofs.n_dofs,
        [&](int t) { return local_linear(mesh, dofs, t, f, rule); }, policy);
}

SparseSystem assemble(const EnrichedSpace& space, const DofMap& dofs, const ScalarField& f,
                      const RuleTri& rule, Exec policy) {
    check_rule(rule);
    if (dofs.kind != ElementKind::Enriched)
        throw std::invalid_argument("assemble: enriched space needs an enriched dof map");
    if (!space.family().vanishes_at_vertices() || !space.family().edge_localized())
        throw std::invalid_argument(
            "assemble: global solves need a vertex-vanishing, edge-localized family");
    if (!space.family().weight_params().nonnegative())
        throw std::invalid_argument("assemble: interior assembly needs alpha, beta >= 0");
    return assemble_impl(
        space.mesh().n_triangles(), dofs.n_dofs,
        [&](int t) { return local_enriched(space, dofs, t, f, rule); }, policy);
}

namespace {

template <class LocalFn>
Eigen::VectorXd load_impl(int nt, int n_dofs, LocalFn&& local, Exec policy) {
    std::vector<LocalContribution> contribs(nt);
    for_each_element(nt, policy, [&](int t) { contribs[t] = local(t); });
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_dofs);
    for (const auto& c : contribs)
        for (int a = 0; a < c.n; ++a)
            if (c.dof[a] >= 0) rhs[c.dof[a]] += c.load[a];
    return rhs;
}

}  // namespace

Eigen::VectorXd assemble_load(const TriMesh& mesh, const DofMap& dofs, const ScalarField& f,
                              const RuleTri& rule, Exec policy) {
    check_rule(rule);
    return load_impl(
        mesh.n_triangles(), dofs.n_dofs,
        [&](int t) {
            LocalContribution c;
            c.n = 3;
            c.dof = element_dofs(mesh, dofs, t);
            const TriGeom geom = mesh.geom(t);
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const auto& b = rule.nodes[q];
                const Vec2 x =
                    b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
                const double w = rule.weights[q] * geom.area() * f(x);
                for (int a = 0; a < 3; ++a) c.load[a] += w * b[a];
            }
            return c;
        },
        policy);
}

Eigen::VectorXd assemble_load(const EnrichedSpace& space, const DofMap& dofs, const ScalarField& f,
                              const RuleTri& rule, Exec policy) {
    check_rule(rule);
    return load_impl(
        space.mesh().n_triangles(), dofs.n_dofs,
        [&](int t) {
            LocalContribution c;
            c.n = 6;
            c.dof = element_dofs(space.mesh(), dofs, t);
            const ElementBasis& basis = space.basis(t);
            const TriGeom& geom = basis.geom();
            std::array<double, 6> phi;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const auto& b = rule.nodes[q];
                const Vec2 x =
                    b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
                const double w = rule.weights[q] * geom.area() * f(x);
                basis.eval(x, &phi, nullptr);
                for (int a = 0; a < 6; ++a) c.load[a] += w * phi[a];
            }
            return c;
        },
        policy);
}

SolveResult solve_dense(const SparseSystem& system) {
    SolveResult res;
    res.method = "cholesky";
    const Eigen::MatrixXd dense = Eigen::MatrixXd(system.matrix);
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_dense: Cholesky failed (matrix not SPD)");
    res.x = llt.solve(system.rhs);
    const double bn = system.rhs.norm();
    res.residual = bn > 0.0 ? (system.rhs - system.matrix * res.x).norm() / bn : 0.0;
    return res;
}

SolveResult solve_cg(const SparseSystem& system, double tol) {
    SolveResult res;
    res.method = "pcg-jacobi";
    const auto& A = system.matrix;
    const Eigen::VectorXd& b = system.rhs;
    const int n = static_cast<int>(A.rows());
    res.x = Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) return res;

    Eigen::VectorXd dinv(n);
    for (int i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        if (!(d > 0.0)) throw std::runtime_error("solve_cg: nonpositive diagonal entry");
        dinv[i] = 1.0 / d;
    }

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = dinv.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const long max_it = 10L * n;
    for (long it = 1; it <= max_it; ++it) {
        const Eigen::VectorXd q = A * p;
        const double alpha = rz / p.dot(q);
        res.x += alpha * p;
        r -= alpha * q;
        res.iterations = static_cast<int>(it);
        res.residual = r.norm() / bnorm;
        if (res.residual <= tol) return res;
        z = dinv.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw std::runtime_error("solve_cg: no convergence in " + std::to_string(max_it) +
                             " iterations, residual " + std::to_string(res.residual));
}

SolveResult solve(const SparseSystem& system, double tol) {
    return system.matrix.rows() <= 2000 ? solve_dense(system) : solve_cg(system, tol);
}

namespace {

// Largest eigenvalue of the SPD operator given by `apply`, stopped when the
// eigen-residual ||A v - rho v|| <= tol * rho (valid bound for symmetric A).
template <class Apply>
double power_iteration(int n, Apply&& apply, double tol, const char* what) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double rho = 0.0;
    for (long it = 0; it < 500000; ++it) {
        const Eigen::VectorXd w = apply(v);
        rho = v.dot(w);
        if ((w - rho * v).norm() <= tol * std::abs(rho)) return rho;
        v = w.normalized();
    }
    throw std::runtime_error(std::string("condition_number: ") + what + " did not converge");
}

}  // namespace

double condition_number(const SparseSystem& system, double tol) {
    const int n = static_cast<int>(system.matrix.rows());
    if (n == 0) throw std::invalid_argument("condition_number: empty system");
    if (n <= 2000) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(system.matrix),
                                                          Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n - 1);
        if (!(lo > 0.0)) throw std::runtime_error("condition_number: matrix is singular");
        return hi / lo;
    }
    const double lmax =
        power_iteration(n, [&](const Eigen::VectorXd& v) { return system.matrix * v; }, tol,
                        "power iteration");
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(system.matrix);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("condition_number: matrix is singular");
    const double inv_lmin = power_iteration(
        n, [&](const Eigen::VectorXd& v) { return llt.solve(v); }, tol, "inverse iteration");
    return lmax * inv_lmin;
}

}  // namespace enrfem
