// Command-line driver: mesh export, per-element admissibility checks,
// interpolation studies, bound-constant optimization, single solves and the
// full convergence study.

#include "enrfem/bench.hpp"

#include "CLI11.hpp"

#include <Eigen/Dense>

#include <fstream>
#include <iostream>
#include <random>

using namespace enrfem;

namespace {

struct FamilyOptions {
    std::string family = "E10";
    double mu = 0.0, alpha = 0.0, beta = 0.0;
    double alpha1 = 1.0, beta1 = 1.0;
    double exponent = 2.0;

    void attach(CLI::App* cmd, bool with_family = true) {
        if (with_family)
            cmd->add_option("--family", family, "family id (E3,E4,E8,E10..E15,W1)");
        cmd->add_option("--mu", mu, "weight exponent mu >= 0");
        cmd->add_option("--alpha", alpha, "weight exponent alpha > -1");
        cmd->add_option("--beta", beta, "weight exponent beta > -1");
        cmd->add_option("--alpha1", alpha1, "first power of the E15 pair");
        cmd->add_option("--beta1", beta1, "second power of the E15 pair");
        cmd->add_option("--exponent", exponent, "exponent of E4/E8");
    }
    EnrichmentFamily make() const {
        return EnrichmentFamily::preset(family_from_name(family),
                                        {{mu, alpha, beta}, alpha1, beta1, exponent});
    }
    FamilySpec spec() const { return {family_from_name(family), alpha1, beta1, exponent}; }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

TriMesh mesh_at_level(int base_n, int level) {
    TriMesh m = friedrichs_keller(base_n);
    for (int l = 0; l < level; ++l) m = refine_uniform(m);
    return m;
}

void print_check(const EnrichmentFamily& fam, const TriGeom& geom, const char* label) {
    const Rule1D edge_rule = gauss_legendre(16);
    const auto fm = functional_matrix(fam, geom, edge_rule);
    Eigen::IOFormat fmt(10, 0, "  ", "\n", "    ");
    std::cout << label << ":\n  functional matrix (rows: edge averages, cols: functions):\n"
              << fm.mat.format(fmt) << "\n"
              << "  singular values: " << fm.sigma_max << " .. " << fm.sigma_min
              << "  (ratio " << fm.kernel_ratio() << ")\n"
              << "  vertex-vanishing fast path: " << (fm.vanishing ? "yes" : "no") << "\n"
              << "  admissible: " << (fm.admissible ? "YES" : "NO") << "\n";
    if (!fm.admissible) return;

    const ElementBasis basis(fam, geom, edge_rule);
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int r = 0; r < 3; ++r)
            worst = std::max(worst,
                             std::abs(basis.value(i, geom.vertex(r)) - (i == r ? 1.0 : 0.0)));
        for (int s = 0; s < 3; ++s) {
            const double avg = edge_average(
                geom, s, [&](const Vec2& x) { return basis.value(i, x); }, edge_rule);
            worst = std::max(worst, std::abs(avg - (i == s + 3 ? 1.0 : 0.0)));
        }
    }
    std::cout << "  max residual of the 36 bi-orthogonality conditions: " << worst << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"enriched linear finite elements for the Poisson problem on the unit square"};
    app.require_subcommand(1);

    // ---- mesh ----
    auto* mesh_cmd = app.add_subcommand("mesh", "export a Friedrichs-Keller mesh");
    int mesh_n = 4, mesh_level = 0;
    std::string mesh_out;
    mesh_cmd->add_option("--n", mesh_n, "base grid cells per side")->check(CLI::PositiveNumber);
    mesh_cmd->add_option("--level", mesh_level, "uniform refinements of the base mesh");
    mesh_cmd->add_option("--out", mesh_out, "output file (default stdout)");

    // ---- check ----
    auto* check_cmd = app.add_subcommand("check", "admissibility report for one family");
    FamilyOptions check_fam;
    check_fam.attach(check_cmd);
    unsigned check_seed = 7;
    check_cmd->add_option("--seed", check_seed, "seed for the random triangle");

    // ---- project ----
    auto* proj_cmd = app.add_subcommand("project", "interpolation-error study (no solves)");
    FamilyOptions proj_fam;
    proj_fam.attach(proj_cmd);
    int proj_problem = 1, proj_levels = 5, proj_quad = 14;
    std::string proj_out;
    proj_cmd->add_option("--problem", proj_problem, "problem id 1..4")->check(CLI::Range(1, 4));
    proj_cmd->add_option("--levels", proj_levels, "number of refinement levels");
    proj_cmd->add_option("--quad-degree", proj_quad, "interior quadrature exactness degree");
    proj_cmd->add_option("--out", proj_out, "output CSV (default stdout)");

    // ---- optimize ----
    auto* opt_cmd = app.add_subcommand("optimize", "grid search of the L2 bound constant");
    double opt_a1 = 2.0, opt_b1 = 0.0, opt_step = 0.01;
    opt_cmd->add_option("--alpha1", opt_a1, "first power exponent")->required();
    opt_cmd->add_option("--beta1", opt_b1, "second power exponent")->required();
    opt_cmd->add_option("--step", opt_step, "simplex grid step (<= 0.01)");

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "assemble and solve one configuration");
    FamilyOptions solve_fam;
    solve_fam.attach(solve_cmd);
    int solve_problem = 1, solve_level = 0, solve_quad = 14;
    bool solve_linear = false;
    std::string solve_out;
    solve_cmd->add_option("--problem", solve_problem, "problem id 1..4")->check(CLI::Range(1, 4));
    solve_cmd->add_option("--level", solve_level, "refinement level of the 32-triangle base");
    solve_cmd->add_option("--quad-degree", solve_quad, "interior quadrature exactness degree");
    solve_cmd->add_flag("--linear", solve_linear, "plain linear element instead of enriched");
    solve_cmd->add_option("--out", solve_out, "output CSV (default stdout)");

    // ---- study ----
    auto* study_cmd = app.add_subcommand("study", "full convergence study");
    std::vector<int> study_problems{1, 2, 3, 4};
    std::vector<std::string> study_families{"E10", "E11", "E12"};
    StudyConfig study_cfg;
    std::string study_out;
    bool study_no_kappa = false, study_serial = false;
    study_cmd->add_option("--problems", study_problems, "problem ids")->delimiter(',');
    study_cmd->add_option("--families", study_families, "family ids")->delimiter(',');
    study_cmd->add_option("--mu", study_cfg.weight.mu, "weight exponent mu");
    study_cmd->add_option("--alpha", study_cfg.weight.alpha, "weight exponent alpha");
    study_cmd->add_option("--beta", study_cfg.weight.beta, "weight exponent beta");
    study_cmd->add_option("--levels", study_cfg.levels, "number of refinement levels");
    study_cmd->add_option("--base-n", study_cfg.base_n, "base grid cells per side");
    study_cmd->add_option("--quad-degree", study_cfg.quad_degree, "interior quadrature degree");
    study_cmd->add_option("--edge-nodes", study_cfg.edge_nodes, "edge quadrature node count");
    study_cmd->add_option("--tol", study_cfg.solver_tol, "iterative solver tolerance");
    study_cmd->add_flag("--no-kappa", study_no_kappa, "skip condition-number estimation");
    study_cmd->add_flag("--serial", study_serial, "disable the parallel element loops");
    study_cmd->add_option("--out", study_out, "output CSV; companion .dat files per problem");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mesh_cmd) {
            const TriMesh m = mesh_at_level(mesh_n, mesh_level);
            if (mesh_out.empty()) {
                write_mesh(m, std::cout);
            } else {
                auto os = open_out(mesh_out);
                write_mesh(m, os);
                const auto mm = metrics(m);
                std::cout << "wrote " << mesh_out << ": " << m.n_vertices() << " vertices, "
                          << m.n_edges() << " edges, " << m.n_triangles() << " triangles, h = "
                          << mm.h << ", max h_E/rho_E = " << mm.regularity_ratio << "\n";
            }
        } else if (*check_cmd) {
            const auto fam = check_fam.make();
            std::cout << "family " << fam.name() << "  (mu=" << check_fam.mu
                      << ", alpha=" << check_fam.alpha << ", beta=" << check_fam.beta << ")\n"
                      << "  vanishes at vertices: " << (fam.vanishes_at_vertices() ? "yes" : "no")
                      << ", edge-localized: " << (fam.edge_localized() ? "yes" : "no")
                      << ", symmetric traces: " << (fam.trace_symmetric() ? "yes" : "no") << "\n";
            print_check(fam, TriGeom(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), "reference triangle");
            std::mt19937 rng(check_seed);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            for (;;) {
                const Vec2 a(uni(rng), uni(rng)), b(uni(rng), uni(rng)), c(uni(rng), uni(rng));
                const double det = cross2(b - a, c - a);
                if (det > 0.1) {
                    print_check(fam, TriGeom(a, b, c), "random triangle");
                    break;
                }
                if (det < -0.1) {
                    print_check(fam, TriGeom(a, c, b), "random triangle");
                    break;
                }
            }
        } else if (*proj_cmd) {
            const auto fam = proj_fam.make();
            const auto& prob = problem(proj_problem);
            const RuleTri rule = triangle_rule(proj_quad);
            const Rule1D edge_rule = gauss_legendre(16);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!proj_out.empty()) {
                file = open_out(proj_out);
                os = &file;
            }
            *os << "# interpolation errors, problem " << proj_problem << ", family "
                << fam.name() << "\n";
            *os << "level,h,linf_lin,linf_enr,l2_lin,l2_enr\n";
            TriMesh mesh = friedrichs_keller(4);
            for (int level = 0; level < proj_levels; ++level) {
                const EnrichedSpace space(mesh, fam, edge_rule);
                double linf_lin = 0.0, linf_enr = 0.0, l2_lin = 0.0, l2_enr = 0.0;
                for (int t = 0; t < mesh.n_triangles(); ++t) {
                    const auto& basis = space.basis(t);
                    const auto pl = project_linear(basis.geom(), prob.u);
                    const auto pe = project_enriched(basis, prob.u, edge_rule);
                    for (int i = 0; i <= 9; ++i)
                        for (int j = 0; i + j <= 9; ++j) {
                            const double l1 = i / 9.0, l2 = j / 9.0;
                            const Vec2 x = basis.geom().vertex(0) * (1 - l1 - l2) +
                                           basis.geom().vertex(1) * l1 +
                                           basis.geom().vertex(2) * l2;
                            linf_lin = std::max(linf_lin, std::abs(prob.u(x) - pl.value(x)));
                            linf_enr = std::max(linf_enr, std::abs(prob.u(x) - pe.value(x)));
                        }
                    l2_lin += rule.integrate(basis.geom(), [&](const Vec2& x) {
                        const double d = prob.u(x) - pl.value(x);
                        return d * d;
                    });
                    l2_enr += rule.integrate(basis.geom(), [&](const Vec2& x) {
                        const double d = prob.u(x) - pe.value(x);
                        return d * d;
                    });
                }
                char line[256];
                std::snprintf(line, sizeof(line), "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", level,
                              metrics(mesh).h, linf_lin, linf_enr, std::sqrt(l2_lin),
                              std::sqrt(l2_enr));
                *os << line;
                if (level + 1 < proj_levels) mesh = refine_uniform(mesh);
            }
        } else if (*opt_cmd) {
            const auto res = optimize_parameters(opt_a1, opt_b1, opt_step);
            std::cout << "grid argmin of the bound constant over {mu+alpha+beta=1}:\n"
                      << "  (mu, alpha, beta) = (" << res.mu << ", " << res.alpha << ", "
                      << res.beta << "), constant (up to common factors) = " << res.c_min << "\n"
                      << "  endpoint (0,1,0): " << res.c_alpha_endpoint << "\n"
                      << "  endpoint (0,0,1): " << res.c_beta_endpoint << "\n"
                      << "  tie: " << (res.tie ? "yes" : "no")
                      << ", matches the endpoint rule: " << (res.matches_theory ? "YES" : "NO")
                      << "\n";
        } else if (*solve_cmd) {
            const auto& prob = problem(solve_problem);
            const TriMesh mesh = mesh_at_level(4, solve_level);
            const RuleTri rule = triangle_rule(solve_quad);
            const Rule1D edge_rule = gauss_legendre(16);
            const auto kind = solve_linear ? ElementKind::Linear : ElementKind::Enriched;
            const auto dofs = build_dof_map(mesh, kind);

            std::optional<EnrichedSpace> space;
            SparseSystem sys;
            if (solve_linear) {
                sys = assemble(mesh, dofs, prob.f, rule);
            } else {
                space.emplace(mesh, solve_fam.make(), edge_rule);
                sys = assemble(*space, dofs, prob.f, rule);
            }
            const auto sol = solve(sys);
            const double energy = energy_error(mesh, dofs, sol.x, prob, rule,
                                               space ? &*space : nullptr);
            const double l2 = l2_error(mesh, dofs, sol.x, prob, rule, space ? &*space : nullptr);
            const double kappa = condition_number(sys);

            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!solve_out.empty()) {
                file = open_out(solve_out);
                os = &file;
            }
            *os << "# problem " << solve_problem << ", "
                << (solve_linear ? std::string("linear") : "family " + solve_fam.family)
                << ", level " << solve_level << ", solver " << sol.method << " ("
                << sol.iterations << " iterations, residual " << sol.residual << ")\n";
            *os << "# kappa: 2-norm condition of the eliminated stiffness matrix\n";
            char line[256];
            std::snprintf(line, sizeof(line), "n_dofs,%d\nenergy_error,%.10g\nl2_error,%.10g\nkappa,%.10g\n",
                          dofs.n_dofs, energy, l2, kappa);
            *os << line << "coefficients\n";
            for (int i = 0; i < sol.x.size(); ++i) {
                std::snprintf(line, sizeof(line), "%.17g\n", sol.x[i]);
                *os << line;
            }
        } else if (*study_cmd) {
            study_cfg.problems = study_problems;
            study_cfg.families.clear();
            for (const auto& name : study_families) {
                FamilyOptions fo;
                fo.family = name;
                study_cfg.families.push_back(fo.spec());
            }
            study_cfg.with_kappa = !study_no_kappa;
            study_cfg.policy = study_serial ? Exec::Serial : Exec::Parallel;
            const StudyReport report = run_study(study_cfg);
            if (study_out.empty()) {
                write_csv(report, std::cout);
            } else {
                auto os = open_out(study_out);
                write_csv(report, os);
                const std::string stem = study_out.substr(0, study_out.rfind('.'));
                for (int pid : study_cfg.problems) {
                    auto dat = open_out(stem + "_p" + std::to_string(pid) + ".dat");
                    write_dat(report, pid, dat);
                }
                std::cout << "wrote " << study_out << " (+ per-problem .dat files), wall "
                          << report.wall_seconds << " s\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
