#include "enrfem/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace enrfem {

TriGeom::TriGeom(const Vec2& a, const Vec2& b, const Vec2& c) : v_{a, b, c} {
    det_ = cross2(v_[0] - v_[2], v_[1] - v_[2]);
    if (!(det_ > 0.0)) {
        throw std::invalid_argument(
            "TriGeom: vertices must be counter-clockwise with positive area");
    }
    area_ = 0.5 * det_;

    // d/dx of (x - p) x q is (q_y, -q_x); the barycentric coordinates are
    // affine so the gradients are constant.
    const Vec2 q1 = v_[1] - v_[2];
    const Vec2 q2 = v_[2] - v_[0];
    const Vec2 q3 = v_[0] - v_[1];
    grad_[0] = Vec2(q1.y(), -q1.x()) / det_;
    grad_[1] = Vec2(q2.y(), -q2.x()) / det_;
    grad_[2] = Vec2(q3.y(), -q3.x()) / det_;

    for (int i = 0; i < 3; ++i)
        elen_[i] = (v_[cyc3(i + 1)] - v_[cyc3(i + 2)]).norm();
}

double TriGeom::longest_edge() const { return *std::max_element(elen_.begin(), elen_.end()); }

std::array<double, 3> TriGeom::bary(const Vec2& x) const {
    return {cross2(x - v_[2], v_[1] - v_[2]) / det_,
            cross2(x - v_[2], v_[2] - v_[0]) / det_,
            cross2(x - v_[0], v_[0] - v_[1]) / det_};
}

std::array<double, 3> vertex_values(const TriGeom& geom, const ScalarField& g) {
    return {g(geom.vertex(0)), g(geom.vertex(1)), g(geom.vertex(2))};
}

}  // namespace enrfem
