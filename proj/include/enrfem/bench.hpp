#pragma once

#include "enrfem/fem.hpp"
#include "enrfem/projection.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace enrfem {

/// One of the four built-in Poisson problems on the unit square with a known
/// exact solution vanishing on the boundary.
struct BenchProblem {
    int id = 0;
    std::string description;
    ScalarField u;
    VectorField grad_u;
    ScalarField f;
};

const BenchProblem& problem(int id);  // id in 1..4

/// sqrt( sum_E int_E |grad u - grad u_h|^2 ); `space` is null for the linear
/// element. Per-element contributions are reduced in fixed element order.
double energy_error(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                    const BenchProblem& prob, const RuleTri& rule,
                    const EnrichedSpace* space = nullptr, Exec policy = Exec::Parallel);

double l2_error(const TriMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                const BenchProblem& prob, const RuleTri& rule,
                const EnrichedSpace* space = nullptr, Exec policy = Exec::Parallel);

struct FamilySpec {
    FamilyId id = FamilyId::E10;
    double alpha1 = 1.0;
    double beta1 = 1.0;
    double exponent = 2.0;
};

struct StudyConfig {
    std::vector<int> problems{1, 2, 3, 4};
    std::vector<FamilySpec> families{{FamilyId::E10}, {FamilyId::E11}, {FamilyId::E12}};
    WeightParams weight;
    int levels = 5;       // refinement levels 0 .. levels-1
    int base_n = 4;       // coarse grid: 2 n^2 triangles
    int quad_degree = 14;
    int edge_nodes = 16;
    double solver_tol = 1e-12;
    bool with_kappa = true;
    Exec policy = Exec::Parallel;
};

struct StudyRow {
    int problem = 0;
    int level = 0;
    double h = 0.0;
    int dofs_lin = 0;
    int dofs_enr = 0;
    double err_lin = 0.0;               // energy seminorm
    std::vector<double> err_fam;
    double l2_lin = 0.0;
    std::vector<double> l2_fam;
    double kappa_lin = 0.0;
    std::vector<double> kappa_fam;
};

struct StudyReport {
    StudyConfig config;
    std::vector<std::string> family_names;
    std::vector<StudyRow> rows;         // problem-major, then level
    double wall_seconds = 0.0;

    const StudyRow* row(int problem, int level) const;
};

StudyReport run_study(const StudyConfig& config);

/// CSV with `# meta` comment lines (timestamp and wall clock live there, so
/// the data rows are byte-reproducible), one header, and the rows grouped per
/// problem. Floats carry 10 significant digits.
void write_csv(const StudyReport& report, std::ostream& os);

/// Per-problem gnuplot-style companion: h and the energy-error columns.
void write_dat(const StudyReport& report, int problem, std::ostream& os);

}  // namespace enrfem
