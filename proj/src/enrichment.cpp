#include "enrfem/enrichment.hpp"

#include <cmath>
#include <stdexcept>

namespace enrfem {

namespace {

// The weight and the 1D factors live on barycentric arguments in [0,1];
// roundoff excursions of quadrature points are snapped back.
inline double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

// t^e with the 0^0 = 1 convention.
inline double pow0(double t, double e) { return e == 0.0 ? 1.0 : std::pow(t, e); }

// d/dt t^e for e != 0. At t = 0 the one-sided limit is finite only for e >= 1.
inline double dpow(double t, double e) {
    if (t == 0.0 && e < 1.0)
        throw std::domain_error("enrichment: gradient of fractional power queried at a zero base");
    return e * std::pow(t, e - 1.0);
}

Factor constant_one() {
    return {[](double) { return 1.0; }, [](double) { return 0.0; }};
}

Factor power_factor(double e) {
    if (e == 0.0) return constant_one();
    if (e == 1.0) return {[](double t) { return t; }, [](double) { return 1.0; }};
    return {[e](double t) { return std::pow(t, e); }, [e](double t) { return dpow(t, e); }};
}

Factor sin_factor() {
    return {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }};
}
Factor expm1_factor() {
    return {[](double t) { return std::expm1(t); }, [](double t) { return std::exp(t); }};
}
Factor cosm1_factor() {
    return {[](double t) { return std::cos(t) - 1.0; }, [](double t) { return -std::sin(t); }};
}
Factor log1p_factor() {
    return {[](double t) { return std::log1p(t); }, [](double t) { return 1.0 / (1.0 + t); }};
}
Factor exp_scaled(double c) {
    return {[c](double t) { return std::exp(c * t); }, [c](double t) { return c * std::exp(c * t); }};
}

}  // namespace

void WeightParams::validate() const {
    if (!(mu >= 0.0)) throw std::invalid_argument("WeightParams: mu must be >= 0");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("WeightParams: alpha and beta must be > -1");
}

double weight(const WeightParams& p, const TriGeom& geom, const Vec2& x) {
    const auto raw = geom.bary(x);
    const std::array<double, 3> lam = {clamp01(raw[0]), clamp01(raw[1]), clamp01(raw[2])};
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
        s += pow0(1.0 - lam[j], p.mu) * pow0(lam[cyc3(j + 1)], p.alpha) *
             pow0(lam[cyc3(j + 2)], p.beta);
    return s;
}

Vec2 weight_gradient(const WeightParams& p, const TriGeom& geom, const Vec2& x) {
    const auto raw = geom.bary(x);
    const std::array<double, 3> lam = {clamp01(raw[0]), clamp01(raw[1]), clamp01(raw[2])};
    Vec2 g = Vec2::Zero();
    for (int j = 0; j < 3; ++j) {
        const int j1 = cyc3(j + 1), j2 = cyc3(j + 2);
        const double a = pow0(1.0 - lam[j], p.mu);
        const double b = pow0(lam[j1], p.alpha);
        const double c = pow0(lam[j2], p.beta);
        if (p.mu != 0.0 && b * c != 0.0) g -= dpow(1.0 - lam[j], p.mu) * b * c * geom.grad_bary(j);
        if (p.alpha != 0.0 && a * c != 0.0) g += a * dpow(lam[j1], p.alpha) * c * geom.grad_bary(j1);
        if (p.beta != 0.0 && a * b != 0.0) g += a * b * dpow(lam[j2], p.beta) * geom.grad_bary(j2);
    }
    return g;
}

std::string family_name(FamilyId id) {
    switch (id) {
        case FamilyId::E3: return "E3";
        case FamilyId::E4: return "E4";
        case FamilyId::E8: return "E8";
        case FamilyId::E10: return "E10";
        case FamilyId::E11: return "E11";
        case FamilyId::E12: return "E12";
        case FamilyId::E13: return "E13";
        case FamilyId::E14: return "E14";
        case FamilyId::E15: return "E15";
        case FamilyId::W1: return "W1";
        case FamilyId::Custom: return "CUSTOM";
    }
    return "CUSTOM";
}

FamilyId family_from_name(const std::string& name) {
    for (FamilyId id : {FamilyId::E3, FamilyId::E4, FamilyId::E8, FamilyId::E10, FamilyId::E11,
                        FamilyId::E12, FamilyId::E13, FamilyId::E14, FamilyId::E15, FamilyId::W1})
        if (family_name(id) == name) return id;
    throw std::invalid_argument("unknown enrichment family: " + name);
}

EnrichmentFamily EnrichmentFamily::preset(FamilyId id, const FamilyParams& params) {
    params.weight.validate();
    EnrichmentFamily fam;
    switch (id) {
        case FamilyId::E10:
            fam = pair_product(params.weight,
                               {sin_factor(), sin_factor(), sin_factor(), sin_factor(),
                                sin_factor(), sin_factor()});
            break;
        case FamilyId::E11:
            fam = pair_product(params.weight,
                               {expm1_factor(), expm1_factor(), expm1_factor(), expm1_factor(),
                                expm1_factor(), expm1_factor()});
            break;
        case FamilyId::E12:
            fam = pair_product(params.weight,
                               {expm1_factor(), sin_factor(), expm1_factor(), sin_factor(),
                                expm1_factor(), sin_factor()});
            break;
        case FamilyId::E13:
            fam = pair_product(params.weight,
                               {sin_factor(), cosm1_factor(), sin_factor(), cosm1_factor(),
                                sin_factor(), cosm1_factor()});
            break;
        case FamilyId::E14:
            fam = pair_product(params.weight,
                               {log1p_factor(), power_factor(1.0), log1p_factor(),
                                power_factor(1.0), log1p_factor(), power_factor(1.0)});
            break;
        case FamilyId::E15: {
            if (!(params.alpha1 >= 0.0) || !(params.beta1 >= 0.0))
                throw std::invalid_argument("E15: alpha1 and beta1 must be >= 0");
            const Factor fa = power_factor(params.alpha1), fb = power_factor(params.beta1);
            fam = pair_product(params.weight, {fa, fb, fa, fb, fa, fb});
            break;
        }
        case FamilyId::W1:
            fam = self_product(params.weight, {power_factor(1.0),
                                               {[](double t) { return 1.0 - t; },
                                                [](double) { return -1.0; }}});
            break;
        case FamilyId::E3:
            fam = coord_product({exp_scaled(1.0), exp_scaled(1.0), exp_scaled(1.0)}, 1.0);
            break;
        case FamilyId::E4:
            if (!(params.exponent > 1.0))
                throw std::invalid_argument("E4: exponent must be > 1");
            fam = coord_product({power_factor(params.exponent), power_factor(params.exponent),
                                 power_factor(params.exponent)},
                                1.0);
            break;
        case FamilyId::E8:
            if (!(params.exponent > 1.0))
                throw std::invalid_argument("E8: exponent must be > 1");
            fam = coord_product({exp_scaled(1.0), exp_scaled(2.0), exp_scaled(3.0)},
                                params.exponent);
            break;
        case FamilyId::Custom:
            throw std::invalid_argument("use pair_product/self_product/coord_product for CUSTOM");
    }
    fam.id_ = id;
    fam.name_ = family_name(id);
    return fam;
}

EnrichmentFamily EnrichmentFamily::pair_product(const WeightParams& w, std::array<Factor, 6> factors,
                                                std::string name) {
    w.validate();
    EnrichmentFamily fam;
    fam.kind_ = Kind::PairProduct;
    fam.weight_ = w;
    fam.pair_ = std::move(factors);
    fam.name_ = std::move(name);
    fam.classify();
    return fam;
}

EnrichmentFamily EnrichmentFamily::self_product(const WeightParams& w, std::vector<Factor> factors,
                                                std::string name) {
    w.validate();
    if (factors.empty()) throw std::invalid_argument("self_product: needs at least one factor");
    EnrichmentFamily fam;
    fam.kind_ = Kind::SelfProduct;
    fam.weight_ = w;
    fam.self_ = std::move(factors);
    fam.name_ = std::move(name);
    fam.classify();
    return fam;
}

EnrichmentFamily EnrichmentFamily::coord_product(std::array<Factor, 3> g, double exponent,
                                                 std::string name) {
    if (!(exponent >= 1.0)) throw std::invalid_argument("coord_product: exponent must be >= 1");
    EnrichmentFamily fam;
    fam.kind_ = Kind::CoordProduct;
    fam.coord_ = std::move(g);
    fam.coord_exponent_ = exponent;
    fam.name_ = std::move(name);
    fam.classify();
    return fam;
}

EnrichmentFamily EnrichmentFamily::scaled(double c) const {
    if (c == 0.0) throw std::invalid_argument("scaled: factor must be nonzero");
    EnrichmentFamily fam = *this;
    fam.scale_ *= c;
    return fam;
}

std::array<double, 3> EnrichmentFamily::values(const TriGeom& geom, const Vec2& x,
                                               const std::array<bool, 3>& flip) const {
    const auto raw = geom.bary(x);
    const std::array<double, 3> lam = {clamp01(raw[0]), clamp01(raw[1]), clamp01(raw[2])};
    std::array<double, 3> out{};
    switch (kind_) {
        case Kind::PairProduct:
            for (int k = 0; k < 3; ++k) {
                WeightParams wp = weight_;
                const Factor* fa = &pair_[2 * k];
                const Factor* fb = &pair_[2 * k + 1];
                if (flip[k]) {
                    std::swap(wp.alpha, wp.beta);
                    std::swap(fa, fb);
                }
                out[k] = scale_ * weight(wp, geom, x) * fa->f(lam[cyc3(k + 1)]) *
                         fb->f(lam[cyc3(k + 2)]);
            }
            break;
        case Kind::SelfProduct: {
            const double w = weight(weight_, geom, x);
            for (int k = 0; k < 3; ++k) {
                double p = 1.0;
                for (const auto& fac : self_) p *= fac.f(lam[k]);
                out[k] = scale_ * w * p;
            }
            break;
        }
        case Kind::CoordProduct:
            for (int k = 0; k < 3; ++k) {
                double p = coord_[k].f(lam[k]);
                for (int m = 0; m < 3; ++m)
                    if (m != k) p *= pow0(lam[m], coord_exponent_ - 1.0);
                out[k] = scale_ * p;
            }
            break;
    }
    return out;
}

std::array<Vec2, 3> EnrichmentFamily::gradients(const TriGeom& geom, const Vec2& x,
                                                const std::array<bool, 3>& flip) const {
    const auto raw = geom.bary(x);
    const std::array<double, 3> lam = {clamp01(raw[0]), clamp01(raw[1]), clamp01(raw[2])};
    std::array<Vec2, 3> out{};
    switch (kind_) {
        case Kind::PairProduct:
            for (int k = 0; k < 3; ++k) {
                WeightParams wp = weight_;
                const Factor* fa = &pair_[2 * k];
                const Factor* fb = &pair_[2 * k + 1];
                if (flip[k]) {
                    std::swap(wp.alpha, wp.beta);
                    std::swap(fa, fb);
                }
                const int k1 = cyc3(k + 1), k2 = cyc3(k + 2);
                const double w = weight(wp, geom, x);
                const Vec2 gw = weight_gradient(wp, geom, x);
                const double va = fa->f(lam[k1]), vb = fb->f(lam[k2]);
                out[k] = scale_ * (gw * (va * vb) +
                                   w * fa->df(lam[k1]) * vb * geom.grad_bary(k1) +
                                   w * va * fb->df(lam[k2]) * geom.grad_bary(k2));
            }
            break;
        case Kind::SelfProduct: {
            const double w = weight(weight_, geom, x);
            const Vec2 gw = weight_gradient(weight_, geom, x);
            for (int k = 0; k < 3; ++k) {
                double p = 1.0, dp = 0.0;
                for (const auto& fac : self_) {
                    dp = dp * fac.f(lam[k]) + p * fac.df(lam[k]);
                    p *= fac.f(lam[k]);
                }
                out[k] = scale_ * (gw * p + w * dp * geom.grad_bary(k));
            }
            break;
        }
        case Kind::CoordProduct: {
            const double e = coord_exponent_ - 1.0;
            for (int k = 0; k < 3; ++k) {
                double prod = 1.0;
                for (int m = 0; m < 3; ++m)
                    if (m != k) prod *= pow0(lam[m], e);
                Vec2 g = coord_[k].df(lam[k]) * prod * geom.grad_bary(k);
                if (e != 0.0) {
                    const double gk = coord_[k].f(lam[k]);
                    for (int m = 0; m < 3; ++m) {
                        if (m == k) continue;
                        double other = 1.0;
                        for (int r = 0; r < 3; ++r)
                            if (r != k && r != m) other *= pow0(lam[r], e);
                        g += gk * dpow(lam[m], e) * other * geom.grad_bary(m);
                    }
                }
                out[k] = scale_ * g;
            }
            break;
        }
    }
    return out;
}

void EnrichmentFamily::classify() {
    const TriGeom ref(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    const std::array<bool, 3> noflip{};
    double mag = 0.0;
    const auto vc = values(ref, ref.centroid(), noflip);
    for (double v : vc) mag = std::max(mag, std::abs(v));

    double vertex_max = 0.0;
    for (int r = 0; r < 3; ++r) {
        const auto vr = values(ref, ref.vertex(r), noflip);
        for (double v : vr) {
            vertex_max = std::max(vertex_max, std::abs(v));
            mag = std::max(mag, std::abs(v));
        }
    }

    const double ts[] = {0.12, 0.35, 0.5, 0.71, 0.93};
    double offedge_max = 0.0, asym_max = 0.0;
    for (int k = 0; k < 3; ++k) {
        for (double t : ts) {
            for (int j = 0; j < 3; ++j) {
                const double v = values(ref, ref.edge_point(j, t), noflip)[k];
                mag = std::max(mag, std::abs(v));
                if (j != k) offedge_max = std::max(offedge_max, std::abs(v));
            }
            const double fwd = values(ref, ref.edge_point(k, t), noflip)[k];
            const double bwd = values(ref, ref.edge_point(k, 1.0 - t), noflip)[k];
            asym_max = std::max(asym_max, std::abs(fwd - bwd));
        }
    }

    const double tol = 1e-13 * (1.0 + mag);
    vanishes_at_vertices_ = vertex_max <= tol;
    edge_localized_ = vanishes_at_vertices_ && offedge_max <= tol;
    trace_symmetric_ = asym_max <= tol;
}

double edge_average(const TriGeom& geom, int edge, const ScalarField& g, const Rule1D& rule,
                    bool flip) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        s += rule.weights[i] * g(geom.edge_point(edge, t, flip)) / rule.jacobi_weight(t);
    }
    return s;
}

FunctionalMatrix functional_matrix(const EnrichmentFamily& family, const TriGeom& geom,
                                   const Rule1D& edge_rule, const std::array<bool, 3>& flip) {
    FunctionalMatrix fm;

    double mag = 0.0;
    for (int r = 0; r < 3; ++r) {
        const auto vals = family.values(geom, geom.vertex(r), flip);
        for (int m = 0; m < 3; ++m) {
            fm.vertex_values(m, r) = vals[m];
            mag = std::max(mag, std::abs(vals[m]));
        }
    }
    {
        const auto vc = family.values(geom, geom.centroid(), flip);
        for (double v : vc) mag = std::max(mag, std::abs(v));
    }
    fm.vanishing = fm.vertex_values.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + mag);

    for (int j = 0; j < 3; ++j) {
        std::array<double, 3> col{};
        for (std::size_t q = 0; q < edge_rule.nodes.size(); ++q) {
            const double t = edge_rule.nodes[q];
            const double w = edge_rule.weights[q] / edge_rule.jacobi_weight(t);
            const auto vals = family.values(geom, geom.edge_point(j, t), flip);
            for (int i = 0; i < 3; ++i) col[i] += w * vals[i];
        }
        for (int i = 0; i < 3; ++i) {
            fm.mat(j, i) = col[i];
            fm.raw_scale = std::max(fm.raw_scale, std::abs(col[i]));
            if (!fm.vanishing) {
                // general path: subtract the linear interpolant's edge averages
                double corr = 0.0;
                for (int r = 0; r < 3; ++r)
                    if (r != j) corr += fm.vertex_values(i, r);
                fm.raw_scale = std::max(fm.raw_scale, 0.5 * std::abs(corr));
                fm.mat(j, i) -= 0.5 * corr;
            }
        }
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(fm.mat);
    fm.sigma_max = svd.singularValues()(0);
    fm.sigma_min = svd.singularValues()(2);
    // A matrix whose entries are pure cancellation noise is singular even if
    // its singular-value ratio looks benign.
    fm.admissible = fm.sigma_max > 1e-13 * fm.raw_scale &&
                    fm.sigma_min / fm.sigma_max >= 1e-12;
    return fm;
}

ElementBasis::ElementBasis(EnrichmentFamily family, const TriGeom& geom, const Rule1D& edge_rule,
                           const std::array<bool, 3>& flip)
    : family_(std::move(family)),
      geom_(geom),
      flip_(flip),
      fm_(functional_matrix(family_, geom, edge_rule, flip)) {
    if (!fm_.admissible)
        throw std::runtime_error("ElementBasis: enrichment not admissible (singular functional matrix)");
    inv_ = fm_.mat.inverse();
}

void ElementBasis::eval(const Vec2& x, std::array<double, 6>* values,
                        std::array<Vec2, 6>* gradients) const {
    const auto lam = geom_.bary(x);
    std::array<double, 3> eps{};
    std::array<Vec2, 3> geps{};

    if (values) {
        const auto ev = family_.values(geom_, x, flip_);
        for (int m = 0; m < 3; ++m) {
            eps[m] = ev[m];
            if (!fm_.vanishing)
                for (int r = 0; r < 3; ++r) eps[m] -= fm_.vertex_values(m, r) * lam[r];
        }
        for (int i = 0; i < 3; ++i) {
            double v = 0.0;
            for (int m = 0; m < 3; ++m) v += inv_(m, i) * eps[m];
            (*values)[3 + i] = v;
        }
        for (int i = 0; i < 3; ++i)
            (*values)[i] =
                lam[i] - 0.5 * ((*values)[3 + cyc3(i + 1)] + (*values)[3 + cyc3(i + 2)]);
    }
    if (gradients) {
        const auto eg = family_.gradients(geom_, x, flip_);
        for (int m = 0; m < 3; ++m) {
            geps[m] = eg[m];
            if (!fm_.vanishing)
                for (int r = 0; r < 3; ++r) geps[m] -= fm_.vertex_values(m, r) * geom_.grad_bary(r);
        }
        for (int i = 0; i < 3; ++i) {
            Vec2 g = Vec2::Zero();
            for (int m = 0; m < 3; ++m) g += inv_(m, i) * geps[m];
            (*gradients)[3 + i] = g;
        }
        for (int i = 0; i < 3; ++i)
            (*gradients)[i] = geom_.grad_bary(i) -
                              0.5 * ((*gradients)[3 + cyc3(i + 1)] + (*gradients)[3 + cyc3(i + 2)]);
    }
}

double ElementBasis::value(int i, const Vec2& x) const {
    std::array<double, 6> vals;
    eval(x, &vals, nullptr);
    return vals[i];
}

Vec2 ElementBasis::gradient(int i, const Vec2& x) const {
    std::array<Vec2, 6> grads;
    eval(x, nullptr, &grads);
    return grads[i];
}

}  // namespace enrfem
