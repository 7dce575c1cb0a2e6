#include "enrfem/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <stdexcept>

namespace enrfem {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

const BenchProblem kProblems[4] = {
    {1, "u = sin(2 pi x1) sin(2 pi x2)",
     [](const Vec2& x) { return std::sin(kTwoPi * x.x()) * std::sin(kTwoPi * x.y()); },
     [](const Vec2& x) {
         return Vec2(kTwoPi * std::cos(kTwoPi * x.x()) * std::sin(kTwoPi * x.y()),
                     kTwoPi * std::sin(kTwoPi * x.x()) * std::cos(kTwoPi * x.y()));
     },
     [](const Vec2& x) {
         return 8.0 * M_PI * M_PI * std::sin(kTwoPi * x.x()) * std::sin(kTwoPi * x.y());
     }},
    {2, "u = (e^{x1(1-x1)} - 1) sin(2 pi x2)",
     [](const Vec2& x) {
         return (std::exp(x.x() * (1.0 - x.x())) - 1.0) * std::sin(kTwoPi * x.y());
     },
     [](const Vec2& x) {
         const double e = std::exp(x.x() * (1.0 - x.x()));
         return Vec2(e * (1.0 - 2.0 * x.x()) * std::sin(kTwoPi * x.y()),
                     kTwoPi * (e - 1.0) * std::cos(kTwoPi * x.y()));
     },
     [](const Vec2& x) {
         const double e = std::exp(-x.x() * (x.x() - 1.0));
         const double s = std::sin(kTwoPi * x.y());
         const double d = 2.0 * x.x() - 1.0;
         return 2.0 * e * s + 4.0 * M_PI * M_PI * s * (e - 1.0) - e * s * d * d;
     }},
    {3, "u = (e^{x1(1-x1)} - 1)(e^{x2(1-x2)} - 1)",
     [](const Vec2& x) {
         return (std::exp(x.x() * (1.0 - x.x())) - 1.0) *
                (std::exp(x.y() * (1.0 - x.y())) - 1.0);
     },
     [](const Vec2& x) {
         const double ex = std::exp(x.x() * (1.0 - x.x()));
         const double ey = std::exp(x.y() * (1.0 - x.y()));
         return Vec2(ex * (1.0 - 2.0 * x.x()) * (ey - 1.0), (ex - 1.0) * ey * (1.0 - 2.0 * x.y()));
     },
     [](const Vec2& x) {
         const double ex = std::exp(-x.x() * (x.x() - 1.0));
         const double ey = std::exp(-x.y() * (x.y() - 1.0));
         const double dx = 2.0 * x.x() - 1.0, dy = 2.0 * x.y() - 1.0;
         return 2.0 * ex * (ey - 1.0) + 2.0 * ey * (ex - 1.0) - ex * dx * dx * (ey - 1.0) -
                ey * dy * dy * (ex - 1.0);
     }},
    {4, "u = x1 x2 (1-x1)(1-x2)",
     [](const Vec2& x) { return x.x() * x.y() * (1.0 - x.x()) * (1.0 - x.y()); },
     [](const Vec2& x) {
         return Vec2((1.0 - 2.0 * x.x()) * x.y() * (1.0 - x.y()),
                     x.x() * (1.0 - x.x()) * (1.0 - 2.0 * x.y()));
     },
     [](const Vec2& x) {
         return -2.0 * x.x() * (x.x() - 1.0) - 2.0 * x.y() * (x.y() - 1.0);
     }},
};

enum class ErrorNorm { Energy, L2 };

double element_error_sq(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& sol,
                        const BenchProblem& prob, const RuleTri& rule, const EnrichedSpace* space,
                        int t, ErrorNorm norm) {
    const TriGeom geom = space ? space->basis(t).geom() : mesh.geom(t);
    const auto dof = element_dofs(mesh, dofs, t);
    const int n = space ? 6 : 3;
    std::array<double, 6> coeff{};
    for (int a = 0; a < n; ++a) coeff[a] = dof[a] >= 0 ? sol[dof[a]] : 0.0;

    std::array<double, 6> phi;
    std::array<Vec2, 6> dphi;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const auto& b = rule.nodes[q];
        const Vec2 x = b[0] * geom.vertex(0) + b[1] * geom.vertex(1) + b[2] * geom.vertex(2);
        const double w = rule.weights[q] * geom.area();
        if (norm == ErrorNorm::Energy) {
            Vec2 gh = Vec2::Zero();
            if (space) {
                space->basis(t).eval(x, nullptr, &dphi);
                for (int a = 0; a < 6; ++a) gh += coeff[a] * dphi[a];
            } else {
                for (int a = 0; a < 3; ++a) gh += coeff[a] * geom.grad_bary(a);
            }
            acc += w * (prob.grad_u(x) - gh).squaredNorm();
        } else {
            double uh = 0.0;
            if (space) {
                space->basis(t).eval(x, &phi, nullptr);
                for (int a = 0; a < 6; ++a) uh += coeff[a] * phi[a];
            } else {
                for (int a = 0; a < 3; ++a) uh += coeff[a] * b[a];
            }
            const double d = prob.u(x) - uh;
            acc += w * d * d;
        }
    }
    return acc;
}

double error_impl(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& sol,
                  const BenchProblem& prob, const RuleTri& rule, const EnrichedSpace* space,
                  Exec policy, ErrorNorm norm) {
    const int nt = mesh.n_triangles();
    std::vector<double> partial(nt);
    if (policy == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t)
            partial[t] = element_error_sq(mesh, dofs, sol, prob, rule, space, t, norm);
    } else {
        for (int t = 0; t < nt; ++t)
            partial[t] = element_error_sq(mesh, dofs, sol, prob, rule, space, t, norm);
    }
    double acc = 0.0;
    for (double p : partial) acc += p;  // fixed-order reduction
    return std::sqrt(acc);
}

}  // namespace

const BenchProblem& problem(int id) {
    if (id < 1 || id > 4) throw std::invalid_argument("problem: id must be in 1..4");
    return kProblems[id - 1];
}

double energy_error(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                    const BenchProblem& prob, const RuleTri& rule, const EnrichedSpace* space,
                    Exec policy) {
    return error_impl(mesh, dofs, solution, prob, rule, space, policy, ErrorNorm::Energy);
}

double l2_error(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                const BenchProblem& prob, const RuleTri& rule, const EnrichedSpace* space,
                Exec policy) {
    return error_impl(mesh, dofs, solution, prob, rule, space, policy, ErrorNorm::L2);
}

const StudyRow* StudyReport::row(int problem, int level) const {
    for (const auto& r : rows)
        if (r.problem == problem && r.level == level) return &r;
    return nullptr;
}

StudyReport run_study(const StudyConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    StudyReport report;
    report.config = config;
    for (const auto& fs : config.families) report.family_names.push_back(family_name(fs.id));

    const RuleTri rule = triangle_rule(config.quad_degree);
    const Rule1D edge_rule = gauss_legendre(config.edge_nodes);
    const int nf = static_cast<int>(config.families.size());

    std::vector<TriMesh> meshes;
    meshes.push_back(friedrichs_keller(config.base_n));
    for (int l = 1; l < config.levels; ++l) meshes.push_back(refine_uniform(meshes.back()));

    // (level, variant)-indexed pieces shared across problems
    std::vector<StudyRow> level_data(config.levels);
    std::vector<DofMap> dofs_lin(config.levels), dofs_enr(config.levels);
    std::vector<SparseSystem> sys_lin(config.levels);
    std::vector<std::vector<SparseSystem>> sys_fam(config.levels);
    std::vector<std::vector<EnrichedSpace>> spaces(config.levels);

    const ScalarField zero = [](const Vec2&) { return 0.0; };
    std::string stage = "setup";
    try {
        for (int l = 0; l < config.levels; ++l) {
            const TriMesh& mesh = meshes[l];
            StudyRow& row = level_data[l];
            row.level = l;
            row.h = metrics(mesh).h;
            dofs_lin[l] = build_dof_map(mesh, ElementKind::Linear);
            dofs_enr[l] = build_dof_map(mesh, ElementKind::Enriched);
            row.dofs_lin = dofs_lin[l].n_dofs;
            row.dofs_enr = dofs_enr[l].n_dofs;

            stage = "assemble linear level " + std::to_string(l);
            sys_lin[l] = assemble(mesh, dofs_lin[l], zero, rule, config.policy);
            if (config.with_kappa) {
                stage = "condition linear level " + std::to_string(l);
                row.kappa_lin = condition_number(sys_lin[l]);
            }

            for (int fi = 0; fi < nf; ++fi) {
                const auto& fs = config.families[fi];
                stage = "basis " + family_name(fs.id) + " level " + std::to_string(l);
                spaces[l].emplace_back(
                    mesh,
                    EnrichmentFamily::preset(
                        fs.id, {config.weight, fs.alpha1, fs.beta1, fs.exponent}),
                    edge_rule, config.policy);
                stage = "assemble " + family_name(fs.id) + " level " + std::to_string(l);
                sys_fam[l].push_back(assemble(spaces[l][fi], dofs_enr[l], zero, rule, config.policy));
                if (config.with_kappa) {
                    stage = "condition " + family_name(fs.id) + " level " + std::to_string(l);
                    row.kappa_fam.push_back(condition_number(sys_fam[l][fi]));
                }
            }
        }

        for (int pid : config.problems) {
            const BenchProblem& prob = problem(pid);
            for (int l = 0; l < config.levels; ++l) {
                const TriMesh& mesh = meshes[l];
                StudyRow row = level_data[l];
                row.problem = pid;

                stage = "solve linear p" + std::to_string(pid) + " level " + std::to_string(l);
                SparseSystem sys = sys_lin[l];
                sys.rhs = assemble_load(mesh, dofs_lin[l], prob.f, rule, config.policy);
                const auto sol = solve(sys, config.solver_tol);
                row.err_lin = energy_error(mesh, dofs_lin[l], sol.x, prob, rule, nullptr,
                                           config.policy);
                row.l2_lin = l2_error(mesh, dofs_lin[l], sol.x, prob, rule, nullptr, config.policy);

                for (int fi = 0; fi < nf; ++fi) {
                    stage = "solve " + report.family_names[fi] + " p" + std::to_string(pid) +
                            " level " + std::to_string(l);
                    SparseSystem esys = sys_fam[l][fi];
                    esys.rhs =
                        assemble_load(spaces[l][fi], dofs_enr[l], prob.f, rule, config.policy);
                    const auto esol = solve(esys, config.solver_tol);
                    row.err_fam.push_back(energy_error(mesh, dofs_enr[l], esol.x, prob, rule,
                                                       &spaces[l][fi], config.policy));
                    row.l2_fam.push_back(
                        l2_error(mesh, dofs_enr[l], esol.x, prob, rule, &spaces[l][fi],
                                 config.policy));
                }
                report.rows.push_back(std::move(row));
            }
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("run_study failed at stage [" + stage + "]: " + e.what());
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_csv(const StudyReport& report, std::ostream& os) {
    const auto& names = report.family_names;
    os << "# enrfem study\n";
    {
        char stamp[64] = "unknown";
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        if (gmtime_r(&now, &tm)) std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
        os << "# timestamp: " << stamp << '\n';
    }
    os << "# wall_seconds: " << fmt(report.wall_seconds) << '\n';
    os << "# base_n: " << report.config.base_n << '\n';
    os << "# weight: mu=" << fmt(report.config.weight.mu)
       << " alpha=" << fmt(report.config.weight.alpha) << " beta=" << fmt(report.config.weight.beta)
       << '\n';
    os << "# quad_degree: " << report.config.quad_degree << '\n';
    os << "# edge_nodes: " << report.config.edge_nodes << '\n';
    os << "# solver: dense cholesky for n<=2000, else jacobi-pcg rel tol "
       << fmt(report.config.solver_tol) << '\n';
    os << "# kappa: 2-norm condition of the Dirichlet-eliminated stiffness matrix "
          "(dense eigensolve n<=2000, else power/inverse iteration rel tol 1e-6)\n";
    os << "# eoc columns: log2 of the energy-error ratio between consecutive levels\n";

    os << "level,h,dofs_lin,dofs_enr,err_lin";
    for (const auto& n : names) os << ",err_" << n;
    os << ",l2_lin";
    for (const auto& n : names) os << ",l2_" << n;
    os << ",eoc_lin";
    for (const auto& n : names) os << ",eoc_" << n;
    os << ",kappa_lin";
    for (const auto& n : names) os << ",kappa_" << n;
    os << '\n';

    for (int pid : report.config.problems) {
        os << "# problem " << pid << ": " << problem(pid).description << '\n';
        const StudyRow* prev = nullptr;
        for (int l = 0; l < report.config.levels; ++l) {
            const StudyRow* r = report.row(pid, l);
            if (!r) continue;
            os << r->level << ',' << fmt(r->h) << ',' << r->dofs_lin << ',' << r->dofs_enr;
            os << ',' << fmt(r->err_lin);
            for (double v : r->err_fam) os << ',' << fmt(v);
            os << ',' << fmt(r->l2_lin);
            for (double v : r->l2_fam) os << ',' << fmt(v);
            const auto eoc = [&](double prev_err, double err) {
                return (prev && prev_err > 0.0 && err > 0.0) ? fmt(std::log2(prev_err / err))
                                                             : std::string("nan");
            };
            os << ',' << eoc(prev ? prev->err_lin : 0.0, r->err_lin);
            for (std::size_t i = 0; i < r->err_fam.size(); ++i)
                os << ',' << eoc(prev ? prev->err_fam[i] : 0.0, r->err_fam[i]);
            os << ',' << fmt(r->kappa_lin);
            for (double v : r->kappa_fam) os << ',' << fmt(v);
            os << '\n';
            prev = r;
        }
    }
}

void write_dat(const StudyReport& report, int problem_id, std::ostream& os) {
    os << "# h err_lin";
    for (const auto& n : report.family_names) os << " err_" << n;
    os << '\n';
    for (int l = 0; l < report.config.levels; ++l) {
        const StudyRow* r = report.row(problem_id, l);
        if (!r) continue;
        os << fmt(r->h) << ' ' << fmt(r->err_lin);
        for (double v : r->err_fam) os << ' ' << fmt(v);
        os << '\n';
    }
}

}  // namespace enrfem
