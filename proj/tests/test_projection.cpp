#include "enrfem/projection.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace enrfem;

namespace {

std::mt19937 rng(550217);

TriGeom random_triangle(double min_det = 0.1) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (;;) {
        const Vec2 a(uni(rng), uni(rng)), b(uni(rng), uni(rng)), c(uni(rng), uni(rng));
        const double det = cross2(b - a, c - a);
        if (det > min_det) return TriGeom(a, b, c);
        if (det < -min_det) return TriGeom(a, c, b);
    }
}

std::vector<Vec2> lattice(const TriGeom& g, int depth) {
    std::vector<Vec2> pts;
    for (int i = 0; i <= depth; ++i)
        for (int j = 0; i + j <= depth; ++j) {
            const double l1 = double(i) / depth, l2 = double(j) / depth;
            pts.push_back(g.vertex(0) * (1.0 - l1 - l2) + g.vertex(1) * l1 + g.vertex(2) * l2);
        }
    return pts;
}

const Rule1D kEdgeRule = gauss_legendre(16);

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("linear projection reproduces linears, frozen quadratic error") {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const TriGeom g = random_triangle();
        const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
        const ScalarField lin = [=](const Vec2& x) { return a + b * x.x() + c * x.y(); };
        const auto p = project_linear(g, lin);
        for (const Vec2& x : lattice(g, 13))
            CHECK(std::abs(p.value(x) - lin(x)) <= 1e-14 * (1.0 + std::abs(lin(x))));
    }

    const TriGeom ref(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    const ScalarField q = [&](const Vec2& x) {
        const auto l = ref.bary(x);
        return l[0] * l[1];
    };
    const auto p = project_linear(ref, q);
    // vertex values vanish, so the projection is zero and the error at the
    // centroid equals g there: 1/9
    CHECK(p.value(ref.centroid()) == 0.0);
    CHECK(q(ref.centroid()) - p.value(ref.centroid()) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));

    const auto pc = project_linear(ref, [](const Vec2&) { return 4.25; });
    CHECK(pc.value(Vec2(0.3, 0.2)) == doctest::Approx(4.25).epsilon(1e-15));
}

TEST_CASE("enriched projection reproduces linears (1000 random cases)") {
    const auto fam = EnrichmentFamily::preset(FamilyId::E10);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    for (int rep = 0; rep < 100; ++rep) {
        const TriGeom g = random_triangle();
        const ElementBasis basis(fam, g, kEdgeRule);
        for (int inner = 0; inner < 10; ++inner) {
            const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
            const ScalarField lin = [=](const Vec2& x) { return a + b * x.x() + c * x.y(); };
            const auto p = project_enriched(basis, lin, kEdgeRule);
            for (const Vec2& x : lattice(g, 6))
                CHECK(std::abs(p.value(x) - lin(x)) <= 1e-10);
        }
    }
}

TEST_CASE("enriched projection fixes its own basis functions") {
    const auto fam = EnrichmentFamily::preset(FamilyId::E11);
    const TriGeom g = random_triangle();
    const ElementBasis basis(fam, g, kEdgeRule);
    const ScalarField phi3 = [&](const Vec2& x) { return basis.value(3, x); };
    const auto p = project_enriched(basis, phi3, kEdgeRule);
    for (const Vec2& x : lattice(g, 15)) CHECK(std::abs(p.value(x) - phi3(x)) <= 1e-11);
}

TEST_CASE("enrichment beats the linear projection on the oscillatory solution") {
    const TriGeom leg(Vec2(0, 0), Vec2(0.25, 0), Vec2(0.25, 0.25));
    const ScalarField u1 = [](const Vec2& x) {
        return std::sin(2 * M_PI * x.x()) * std::sin(2 * M_PI * x.y());
    };
    const auto fam = EnrichmentFamily::preset(FamilyId::E10);
    const ElementBasis basis(fam, leg, kEdgeRule);
    const auto pe = project_enriched(basis, u1, kEdgeRule);
    const auto pl = project_linear(leg, u1);
    double linf_e = 0.0, linf_l = 0.0;
    for (const Vec2& x : lattice(leg, 19)) {  // 210 sample points
        linf_e = std::max(linf_e, std::abs(u1(x) - pe.value(x)));
        linf_l = std::max(linf_l, std::abs(u1(x) - pl.value(x)));
    }
    CHECK(linf_e < linf_l);
}

TEST_CASE("error decomposition identity") {
    const auto fam = EnrichmentFamily::preset(FamilyId::E10);
    for (int rep = 0; rep < 10; ++rep) {
        const TriGeom g = random_triangle();
        const ElementBasis basis(fam, g, kEdgeRule);
        const auto pts = lattice(g, 10);

        const ScalarField smooth = [](const Vec2& x) {
            return std::exp(x.x()) * std::cos(2.0 * x.y()) + x.x() * x.x();
        };
        CHECK(error_decomposition_residual(basis, smooth, kEdgeRule, pts) <= 1e-10);

        const ScalarField lin = [](const Vec2& x) { return 1.0 + 2.0 * x.x() - 0.7 * x.y(); };
        CHECK(error_decomposition_residual(basis, lin, kEdgeRule, pts) <= 1e-10);

        const ScalarField first_enrichment = [&](const Vec2& x) { return fam.values(g, x)[0]; };
        CHECK(error_decomposition_residual(basis, first_enrichment, kEdgeRule, pts) <= 1e-10);
    }
    // the identity is stated for vertex-vanishing families only
    const auto e3 = EnrichmentFamily::preset(FamilyId::E3);
    const TriGeom g = random_triangle();
    const ElementBasis b3(e3, g, kEdgeRule);
    const std::vector<Vec2> one{g.centroid()};
    CHECK_THROWS_AS(error_decomposition_residual(
                        b3, [](const Vec2&) { return 1.0; }, kEdgeRule, one),
                    std::invalid_argument);
}

TEST_CASE("bound constants") {
    const ScalarField u4 = [](const Vec2& x) {
        return x.x() * x.y() * (1.0 - x.x()) * (1.0 - x.y());
    };

    // power-pair with constant factors under the (0,1,0) weight:
    // edge integral B(2,1) = 1/2, H = 2
    const auto e15 = EnrichmentFamily::preset(FamilyId::E15, {{0.0, 1.0, 0.0}, 0.0, 0.0});
    const auto bc = bound_constants(e15, u4);
    CHECK(bc.factor_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bc.edge_integral_bound == doctest::Approx(2.0).epsilon(1e-12));

    const auto e10 = EnrichmentFamily::preset(FamilyId::E10);
    const auto bc10 = bound_constants(e10, u4);
    CHECK(bc10.factor_bound == doctest::Approx(0.8414709848078965).epsilon(1e-12));  // sin 1

    // analytic-Hessian oracle for L(grad u4): spectral norm of
    // [[-2y(1-y), (1-2x)(1-2y)], [(1-2x)(1-2y), -2x(1-x)]]
    double oracle = 0.0;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            const double x = i / 200.0, y = j / 200.0;
            const double a = -2.0 * y * (1.0 - y), b = -2.0 * x * (1.0 - x);
            const double c = (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
            const double tr = 0.5 * (a + b), disc = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
            oracle = std::max({oracle, std::abs(tr + disc), std::abs(tr - disc)});
        }
    CHECK(bc10.grad_lipschitz == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(bc10.constant > 0.0);

    // mu-monotonicity of the constant at fixed alpha, beta
    const auto e10mu = EnrichmentFamily::preset(FamilyId::E10, {{2.0, 0.0, 0.0}});
    CHECK(bound_constants(e10mu, u4).constant > bc10.constant);

    // a factor pair with a vanishing edge integral is rejected:
    // int (t - 1/2) * 1 dt = 0
    const Factor odd{[](double t) { return t - 0.5; }, [](double) { return 1.0; }};
    const Factor one{[](double) { return 1.0; }, [](double) { return 0.0; }};
    const auto degenerate = EnrichmentFamily::pair_product({0, 0, 0}, {odd, one, odd, one, odd, one});
    CHECK_THROWS_AS(bound_constants(degenerate, u4), std::runtime_error);
}

TEST_CASE("pointwise error bound holds on small elements") {
    const auto fam = EnrichmentFamily::preset(FamilyId::E10);
    const std::vector<ScalarField> gs = {
        [](const Vec2& x) { return std::sin(2 * M_PI * x.x()) * std::sin(2 * M_PI * x.y()); },
        [](const Vec2& x) { return (std::exp(x.x() * (1 - x.x())) - 1) * std::sin(2 * M_PI * x.y()); },
        [](const Vec2& x) {
            return (std::exp(x.x() * (1 - x.x())) - 1) * (std::exp(x.y() * (1 - x.y())) - 1);
        },
        [](const Vec2& x) { return x.x() * x.y() * (1 - x.x()) * (1 - x.y()); }};
    std::vector<double> lips;
    for (const auto& g : gs) lips.push_back(sampled_grad_lipschitz(g));

    for (int rep = 0; rep < 25; ++rep) {
        TriGeom big = random_triangle();
        const Vec2 c = big.centroid();
        const TriGeom small(c + 0.35 * (big.vertex(0) - c), c + 0.35 * (big.vertex(1) - c),
                            c + 0.35 * (big.vertex(2) - c));
        REQUIRE(small.longest_edge() <= 0.5);
        const ElementBasis basis(fam, small, kEdgeRule);
        const auto pts = lattice(small, 14);
        double phimax = 0.0;
        for (int i = 3; i < 6; ++i)
            for (const Vec2& x : pts) phimax = std::max(phimax, std::abs(basis.value(i, x)));
        const double h2 = small.longest_edge() * small.longest_edge();
        for (std::size_t gi = 0; gi < gs.size(); ++gi) {
            const auto p = project_enriched(basis, gs[gi], kEdgeRule);
            double linf = 0.0;
            for (const Vec2& x : pts) linf = std::max(linf, std::abs(gs[gi](x) - p.value(x)));
            CHECK(linf <= lips[gi] / 8.0 * (1.0 + 1.5 * phimax) * h2);
        }
    }
}

TEST_CASE("parameter optimization over the simplex") {
    const auto r20 = optimize_parameters(2.0, 0.0);
    CHECK(r20.mu == 0.0);
    CHECK(r20.alpha == 1.0);
    CHECK(r20.beta == 0.0);
    CHECK(r20.matches_theory);

    const auto r02 = optimize_parameters(0.0, 2.0);
    CHECK(r02.mu == 0.0);
    CHECK(r02.alpha == 0.0);
    CHECK(r02.beta == 1.0);
    CHECK(r02.matches_theory);

    const auto tie = optimize_parameters(1.5, 1.5);
    CHECK(tie.tie);
    CHECK(std::abs(tie.c_alpha_endpoint - tie.c_beta_endpoint) <=
          1e-10 * tie.c_alpha_endpoint);
    CHECK(tie.matches_theory);

    // quasi-optimality proxy: B(alpha+1, 2-alpha) on the mu=0 segment is
    // maximized at an endpoint
    const auto beta_fn = [](double a, double b) {
        return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    };
    double best = 0.0, best_alpha = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double alpha = i / 100.0;
        const double v = beta_fn(alpha + 1.0, 2.0 - alpha);
        if (v > best + 1e-15) {
            best = v;
            best_alpha = alpha;
        }
    }
    CHECK((best_alpha == 0.0 || best_alpha == 1.0));
}

}  // TEST_SUITE
