#include "enrfem/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace enrfem {

double Rule1D::jacobi_weight(double t) const {
    const double a = alpha == 0.0 ? 1.0 : std::pow(t, alpha);
    const double b = beta == 0.0 ? 1.0 : std::pow(1.0 - t, beta);
    return a * b;
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Golub-Welsch: nodes and weights from the symmetric tridiagonal matrix of
// the monic Jacobi recurrence for the weight (1-x)^a (1+x)^b on [-1,1].
Rule1D golub_welsch_jacobi(int k, double a, double b) {
    Eigen::VectorXd diag(k), sub(k > 1 ? k - 1 : 1);
    const double apb = a + b;
    diag[0] = (b - a) / (apb + 2.0);
    for (int n = 1; n < k; ++n) {
        const double d = 2.0 * n + apb;
        diag[n] = (b * b - a * a) / (d * (d + 2.0));
    }
    for (int n = 1; n < k; ++n) {
        double bn;
        if (n == 1)
            bn = 4.0 * (a + 1.0) * (b + 1.0) / ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
        else {
            const double d = 2.0 * n + apb;
            bn = 4.0 * n * (n + a) * (n + b) * (n + apb) / (d * d * (d + 1.0) * (d - 1.0));
        }
        sub[n - 1] = std::sqrt(bn);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(k - 1, 0)));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi: tridiagonal eigensolve failed");

    const double mu0 = std::exp((apb + 1.0) * std::log(2.0) + log_beta(a + 1.0, b + 1.0));
    Rule1D rule;
    rule.nodes.resize(k);
    rule.weights.resize(k);
    for (int i = 0; i < k; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double q = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * q * q;
    }
    return rule;
}

}  // namespace

Rule1D gauss_jacobi(int k, double alpha, double beta) {
    if (k < 1) throw std::invalid_argument("gauss_jacobi: k must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("gauss_jacobi: alpha and beta must be > -1");
    // Weight t^alpha (1-t)^beta on [0,1] maps to (1-x)^beta (1+x)^alpha on [-1,1].
    Rule1D rule = golub_welsch_jacobi(k, beta, alpha);
    const double scale = std::pow(2.0, alpha + beta + 1.0);
    for (int i = 0; i < k; ++i) {
        rule.nodes[i] = 0.5 * (rule.nodes[i] + 1.0);
        rule.weights[i] /= scale;
    }
    rule.alpha = alpha;
    rule.beta = beta;
    return rule;
}

Rule1D gauss_legendre(int k) {
    if (k < 1 || k > 64) throw std::invalid_argument("gauss_legendre: k must be in [1,64]");
    return gauss_jacobi(k, 0.0, 0.0);
}

double bary_monomial_integral(int a, int b, int c) {
    // a! b! c! * 2 / (a+b+c+2)! evaluated stably as a product.
    double v = 2.0;
    int top = 1;  // consumed factors of (a+b+c+2)!
    for (int e : {a, b, c})
        for (int i = 1; i <= e; ++i) v *= double(i) / double(++top);
    while (top < a + b + c + 2) v /= double(++top);
    return v;
}

namespace {

RuleTri tabulated_degree2() {
    RuleTri r;
    r.degree = 2;
    const double w = 1.0 / 3.0, h = 1.0 / 6.0, g = 2.0 / 3.0;
    r.nodes = {{g, h, h}, {h, g, h}, {h, h, g}};
    r.weights = {w, w, w};
    return r;
}

RuleTri tabulated_degree5() {
    RuleTri r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    const double g1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double g2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    r.nodes.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 40.0);
    for (const auto& [g, w] : {std::pair{g1, w1}, std::pair{g2, w2}}) {
        const double c = 1.0 - 2.0 * g;
        r.nodes.push_back({c, g, g});
        r.nodes.push_back({g, c, g});
        r.nodes.push_back({g, g, c});
        r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
}

// Duffy transform of a tensor Gauss-Legendre grid: all nodes interior, all
// weights positive, exact to the requested total degree.
RuleTri duffy_rule(int degree) {
    const int k = (degree + 3) / 2;  // 2k-1 >= degree+1
    const Rule1D gl = gauss_legendre(k);
    RuleTri r;
    r.degree = degree;
    r.nodes.reserve(k * k);
    r.weights.reserve(k * k);
    for (int i = 0; i < k; ++i) {
        const double u = gl.nodes[i];
        for (int j = 0; j < k; ++j) {
            const double v = gl.nodes[j];
            r.nodes.push_back({(1.0 - u) * (1.0 - v), u, (1.0 - u) * v});
            r.weights.push_back(2.0 * gl.weights[i] * gl.weights[j] * (1.0 - u));
        }
    }
    return r;
}

}  // namespace

RuleTri triangle_rule(int degree) {
    switch (degree) {
        case 2: return tabulated_degree2();
        case 5: return tabulated_degree5();
        case 8:
        case 11:
        case 14:
        case 20: return duffy_rule(degree);
        default:
            throw std::invalid_argument("triangle_rule: degree must be one of {2,5,8,11,14,20}");
    }
}

}  // namespace enrfem
