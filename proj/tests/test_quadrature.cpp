#include "enrfem/quadrature.hpp"

#include "doctest.h"

#include <cmath>

using namespace enrfem;

namespace {

// Beta-function oracle through lgamma, independent of the rule construction.
double beta_oracle(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre basics") {
    const Rule1D r1 = gauss_legendre(1);
    CHECK(r1.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

    // frozen from the roots of the degree-2 Legendre polynomial
    const Rule1D r2 = gauss_legendre(2);
    CHECK(r2.nodes[0] == doctest::Approx(0.21132486540518708).epsilon(1e-14));
    CHECK(r2.nodes[1] == doctest::Approx(0.7886751345948129).epsilon(1e-14));

    CHECK(r2.integrate([](double t) { return t * t * t; }) == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(65), std::invalid_argument);
}

TEST_CASE("1d exactness against the beta oracle") {
    for (int k : {1, 2, 3, 5, 8, 16, 64}) {
        const Rule1D r = gauss_legendre(k);
        for (int m = 0; m <= 2 * k - 1; ++m) {
            const double exact = 1.0 / (m + 1);
            CHECK(r.integrate([m](double t) { return std::pow(t, m); }) ==
                  doctest::Approx(exact).epsilon(1e-12));
        }
    }
    for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 2.0}, {-0.5, 0.3}, {2.5, -0.9}}) {
        for (int k : {1, 4, 16}) {
            const Rule1D r = gauss_jacobi(k, a, b);
            CHECK(r.alpha == a);
            CHECK(r.beta == b);
            double wsum = 0.0;
            for (double w : r.weights) {
                CHECK(w > 0.0);
                wsum += w;
            }
            CHECK(wsum == doctest::Approx(beta_oracle(a + 1, b + 1)).epsilon(1e-13));
            for (int m = 0; m <= 2 * k - 1; ++m)
                CHECK(r.integrate([m](double t) { return std::pow(t, m); }) ==
                      doctest::Approx(beta_oracle(a + 1 + m, b + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gauss-jacobi reduces to gauss-legendre and matches spec examples") {
    for (int k : {1, 2, 7, 16}) {
        const Rule1D gl = gauss_legendre(k);
        const Rule1D gj = gauss_jacobi(k, 0.0, 0.0);
        for (int i = 0; i < k; ++i) {
            CHECK(std::abs(gl.nodes[i] - gj.nodes[i]) <= 1e-14);
            CHECK(std::abs(gl.weights[i] - gj.weights[i]) <= 1e-14);
        }
    }

    const Rule1D r10 = gauss_jacobi(1, 1.0, 0.0);
    CHECK(r10.weights[0] == doctest::Approx(0.5).epsilon(1e-14));  // B(2,1) = 1/2

    // int_0^1 t * t dt = 1/3, the first t supplied by the weight
    for (int k : {1, 2, 5}) {
        const Rule1D r = gauss_jacobi(k, 1.0, 0.0);
        CHECK(r.integrate([](double t) { return t; }) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    }

    CHECK_THROWS_AS(gauss_jacobi(3, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_jacobi(3, 0.0, -1.5), std::invalid_argument);
}

TEST_CASE("triangle rules: spec examples") {
    const TriGeom ref(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    const RuleTri r2 = triangle_rule(2);
    const auto l1l2 = [&](const Vec2& x) {
        const auto l = ref.bary(x);
        return l[0] * l[1];
    };
    const auto l1sq = [&](const Vec2& x) {
        const auto l = ref.bary(x);
        return l[0] * l[0];
    };
    CHECK(r2.integrate(ref, [](const Vec2&) { return 1.0; }) ==
          doctest::Approx(ref.area()).epsilon(1e-15));
    CHECK(r2.integrate(ref, l1l2) == doctest::Approx(ref.area() / 12.0).epsilon(1e-14));
    CHECK(r2.integrate(ref, l1sq) == doctest::Approx(ref.area() / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(triangle_rule(3), std::invalid_argument);
}

TEST_CASE("triangle exactness sweep against the factorial formula") {
    // a! b! c! 2 / (a+b+c+2)! cross-checked against its product-form evaluation
    CHECK(bary_monomial_integral(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bary_monomial_integral(1, 1, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(bary_monomial_integral(2, 0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const TriGeom geom(Vec2(0.2, 0.1), Vec2(1.1, 0.4), Vec2(0.3, 0.9));
    for (int degree : {2, 5, 8, 11, 14, 20}) {
        const RuleTri rule = triangle_rule(degree);
        double wsum = 0.0;
        for (std::size_t i = 0; i < rule.weights.size(); ++i) {
            CHECK(rule.weights[i] > 0.0);
            wsum += rule.weights[i];
            for (double c : rule.nodes[i]) {
                CHECK(c > 0.0);
                CHECK(c < 1.0);
            }
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                const int c = 0;  // full triple sweep below at low degree
                const double exact =
                    factorial(a) * factorial(b) * factorial(c) * 2.0 / factorial(a + b + c + 2);
                const double got = rule.integrate(geom, [&](const Vec2& x) {
                    const auto l = geom.bary(x);
                    return std::pow(l[0], a) * std::pow(l[1], b);
                }) / geom.area();
                CHECK(got == doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }
    const RuleTri r8 = triangle_rule(8);
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; a + b <= 8; ++b)
            for (int c = 0; a + b + c <= 8; ++c) {
                const double got = r8.integrate(geom, [&](const Vec2& x) {
                    const auto l = geom.bary(x);
                    return std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
                }) / geom.area();
                CHECK(got == doctest::Approx(bary_monomial_integral(a, b, c)).epsilon(1e-12));
            }
}

TEST_CASE("transcendental refinement consistency") {
    const TriGeom geom(Vec2(0, 0), Vec2(0.25, 0), Vec2(0.25, 0.25));
    const auto f = [&](const Vec2& x) { return std::exp(geom.bary(x)[0]); };
    const double d14 = triangle_rule(14).integrate(geom, f);
    const double d20 = triangle_rule(20).integrate(geom, f);
    CHECK(std::abs(d14 - d20) <= 1e-12 * std::abs(d20));
}

}  // TEST_SUITE
