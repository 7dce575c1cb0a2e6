// Compares the serial reference kernels against the OpenMP paths and checks
// that both produce bit-identical results.

#include "enrfem/bench.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#else
static int omp_get_max_threads() { return 1; }
#endif

using namespace enrfem;

namespace {

double wall() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = wall();
        fn();
        best = std::min(best, wall() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int level = argc > 1 ? std::atoi(argv[1]) : 3;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 3;

    TriMesh mesh = friedrichs_keller(4);
    for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    const auto dofs = build_dof_map(mesh, ElementKind::Enriched);
    const RuleTri rule = triangle_rule(14);
    const Rule1D edge_rule = gauss_legendre(16);
    const auto& prob = problem(1);

    std::printf("level %d: %d triangles, %d enriched dofs, %d thread(s)\n", level,
                mesh.n_triangles(), dofs.n_dofs, omp_get_max_threads());

    double t_space_s = 0, t_space_p = 0;
    t_space_s = time_best_of(reps, [&] {
        EnrichedSpace s(mesh, EnrichmentFamily::preset(FamilyId::E10), edge_rule, Exec::Serial);
    });
    t_space_p = time_best_of(reps, [&] {
        EnrichedSpace s(mesh, EnrichmentFamily::preset(FamilyId::E10), edge_rule, Exec::Parallel);
    });
    std::printf("basis construction: serial %8.3f ms | parallel %8.3f ms | speedup %.2fx\n",
                1e3 * t_space_s, 1e3 * t_space_p, t_space_s / t_space_p);

    const EnrichedSpace space(mesh, EnrichmentFamily::preset(FamilyId::E10), edge_rule);
    SparseSystem serial_sys, parallel_sys;
    const double t_asm_s =
        time_best_of(reps, [&] { serial_sys = assemble(space, dofs, prob.f, rule, Exec::Serial); });
    const double t_asm_p = time_best_of(
        reps, [&] { parallel_sys = assemble(space, dofs, prob.f, rule, Exec::Parallel); });
    std::printf("assembly:           serial %8.3f ms | parallel %8.3f ms | speedup %.2fx\n",
                1e3 * t_asm_s, 1e3 * t_asm_p, t_asm_s / t_asm_p);

    bool identical = serial_sys.rhs.size() == parallel_sys.rhs.size() &&
                     serial_sys.matrix.nonZeros() == parallel_sys.matrix.nonZeros();
    for (int i = 0; identical && i < serial_sys.rhs.size(); ++i)
        identical = serial_sys.rhs[i] == parallel_sys.rhs[i];
    for (int k = 0; identical && k < serial_sys.matrix.nonZeros(); ++k)
        identical = serial_sys.matrix.valuePtr()[k] == parallel_sys.matrix.valuePtr()[k];
    std::printf("serial vs parallel system: %s\n", identical ? "bit-identical" : "MISMATCH");

    const auto sol = solve(serial_sys);
    double e_s = 0, e_p = 0;
    const double t_err_s = time_best_of(reps, [&] {
        e_s = energy_error(mesh, dofs, sol.x, prob, rule, &space, Exec::Serial);
    });
    const double t_err_p = time_best_of(reps, [&] {
        e_p = energy_error(mesh, dofs, sol.x, prob, rule, &space, Exec::Parallel);
    });
    std::printf("energy error:       serial %8.3f ms | parallel %8.3f ms | speedup %.2fx\n",
                1e3 * t_err_s, 1e3 * t_err_p, t_err_s / t_err_p);
    std::printf("energy error value: %s (%.12g)\n",
                e_s == e_p ? "bit-identical" : "MISMATCH", e_s);

    return identical && e_s == e_p ? 0 : 1;
}
