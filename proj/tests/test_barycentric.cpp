#include "enrfem/geometry.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace enrfem;

namespace {

std::mt19937 rng(20240901);

TriGeom random_triangle() {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (;;) {
        const Vec2 a(uni(rng), uni(rng)), b(uni(rng), uni(rng)), c(uni(rng), uni(rng));
        const double det = cross2(b - a, c - a);
        if (det > 0.1) return TriGeom(a, b, c);
        if (det < -0.1) return TriGeom(a, c, b);
    }
}

Vec2 random_interior_point(const TriGeom& g, double margin = 0.05) {
    std::uniform_real_distribution<double> uni(margin, 1.0 - margin);
    double l1 = uni(rng), l2 = uni(rng);
    if (l1 + l2 > 1.0 - margin) {
        l1 = 1.0 - margin - l1 * (1.0 - 2.0 * margin);
        l2 = 1.0 - margin - l2;
    }
    if (l1 + l2 > 1.0 - margin) l2 = (1.0 - margin) - l1;
    return g.vertex(0) * (1.0 - l1 - l2) + g.vertex(1) * l1 + g.vertex(2) * l2;
}

// Independent oracle: solve the 2x2 linear system for (l1, l2).
std::array<double, 3> bary_by_solve(const TriGeom& g, const Vec2& x) {
    Eigen::Matrix2d m;
    m.col(0) = g.vertex(0) - g.vertex(2);
    m.col(1) = g.vertex(1) - g.vertex(2);
    const Eigen::Vector2d l = m.colPivHouseholderQr().solve(x - g.vertex(2));
    return {l[0], l[1], 1.0 - l[0] - l[1]};
}

}  // namespace

TEST_SUITE("barycentric") {

TEST_CASE("kronecker, centroid and the frozen reference example") {
    const TriGeom ref(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    for (int i = 0; i < 3; ++i) {
        const auto l = ref.bary(ref.vertex(i));
        for (int j = 0; j < 3; ++j) CHECK(l[j] == (i == j ? 1.0 : 0.0));
    }
    const auto lc = ref.bary(ref.centroid());
    for (double v : lc) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const auto l = ref.bary(Vec2(0.2, 0.3));
    CHECK(l[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(l[2] == doctest::Approx(0.3).epsilon(1e-15));

    CHECK_THROWS_AS(TriGeom(Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)), std::invalid_argument);  // CW
    CHECK_THROWS_AS(TriGeom(Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)), std::invalid_argument);
}

TEST_CASE("matches the 2x2-solve oracle on random triangles") {
    for (int rep = 0; rep < 50; ++rep) {
        const TriGeom g = random_triangle();
        const Vec2 x = random_interior_point(g);
        const auto got = g.bary(x);
        const auto ora = bary_by_solve(g, x);
        for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(ora[i]).epsilon(1e-12));
    }
}

TEST_CASE("partition of unity and the affine identity") {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const TriGeom g = random_triangle();
        const Vec2 x = random_interior_point(g), y = random_interior_point(g);
        const auto lx = g.bary(x);
        CHECK(std::abs(lx[0] + lx[1] + lx[2] - 1.0) <= 1e-14);
        const double t = uni(rng);
        const auto lmix = g.bary(t * x + (1.0 - t) * y);
        const auto ly = g.bary(y);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(lmix[i] - (t * lx[i] + (1.0 - t) * ly[i])) <= 1e-14);
    }
}

TEST_CASE("gradients: finite differences, zero sum, edge lengths") {
    const double step = 1e-6;
    for (int rep = 0; rep < 10; ++rep) {
        const TriGeom g = random_triangle();
        CHECK((g.grad_bary(0) + g.grad_bary(1) + g.grad_bary(2)).norm() <= 1e-12);
        for (int i = 0; i < 3; ++i)
            CHECK(g.edge_length(i) ==
                  (g.vertex(cyc3(i + 1)) - g.vertex(cyc3(i + 2))).norm());
        for (int p = 0; p < 10; ++p) {
            const Vec2 x = random_interior_point(g);
            for (int i = 0; i < 3; ++i) {
                const Vec2 fd((g.bary(x + Vec2(step, 0))[i] - g.bary(x - Vec2(step, 0))[i]) /
                                  (2 * step),
                              (g.bary(x + Vec2(0, step))[i] - g.bary(x - Vec2(0, step))[i]) /
                                  (2 * step));
                CHECK((fd - g.grad_bary(i)).norm() <= 1e-7);
            }
        }
    }
}

TEST_CASE("edge parametrization") {
    const TriGeom g = random_triangle();
    for (int i = 0; i < 3; ++i) {
        CHECK((g.edge_point(i, 1.0) - g.vertex(cyc3(i + 1))).norm() == 0.0);
        CHECK((g.edge_point(i, 0.0) - g.vertex(cyc3(i + 2))).norm() == 0.0);
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto l = g.bary(g.edge_point(i, t));
            CHECK(std::abs(l[i]) <= 1e-14);                  // vanishes on the opposite edge
            CHECK(l[cyc3(i + 1)] == doctest::Approx(t).epsilon(1e-13));
            CHECK((g.edge_point(i, t, true) - g.edge_point(i, 1.0 - t)).norm() == 0.0);
        }
    }
}

TEST_CASE("vertex functionals") {
    const TriGeom ref(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    const auto picks = vertex_values(ref, [&](const Vec2& x) { return ref.bary(x)[1]; });
    CHECK(picks[0] == 0.0);
    CHECK(picks[1] == 1.0);
    CHECK(picks[2] == 0.0);
    const auto constant = vertex_values(ref, [](const Vec2&) { return 7.5; });
    for (double v : constant) CHECK(v == 7.5);
    const auto sum = vertex_values(ref, [](const Vec2& x) { return x.x() + x.y(); });
    CHECK(sum[0] == 0.0);
    CHECK(sum[1] == 1.0);
    CHECK(sum[2] == 1.0);
}

}  // TEST_SUITE
