#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>

namespace enrfem {

using Vec2 = Eigen::Vector2d;
using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Cyclic vertex/edge index on {0,1,2}: cyc3(i+1) and cyc3(i+2) are the
/// successors of i, matching the convention v4:=v1, v5:=v2.
inline constexpr int cyc3(int i) { return i < 3 ? i : i - 3; }

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Geometry of a single counter-clockwise triangle: barycentric coordinates,
/// their constant gradients, edge lengths and edge parametrizations.
///
/// Edge i is the edge opposite vertex i. The local parametrization of edge i
/// is t -> t*v_{i+1} + (1-t)*v_{i+2}; passing flip=true reverses it, which is
/// how mesh-canonical (low index -> high index) orientations are realized.
class TriGeom {
public:
    TriGeom(const Vec2& a, const Vec2& b, const Vec2& c);

    double area() const { return area_; }
    const Vec2& vertex(int i) const { return v_[i]; }
    const Vec2& grad_bary(int i) const { return grad_[i]; }
    double edge_length(int i) const { return elen_[i]; }
    double longest_edge() const;
    Vec2 centroid() const { return (v_[0] + v_[1] + v_[2]) / 3.0; }

    /// Barycentric coordinates of x; sums to 1, may leave [0,1] outside the triangle.
    std::array<double, 3> bary(const Vec2& x) const;

    Vec2 edge_point(int i, double t, bool flip = false) const {
        if (flip) t = 1.0 - t;
        return t * v_[cyc3(i + 1)] + (1.0 - t) * v_[cyc3(i + 2)];
    }

private:
    std::array<Vec2, 3> v_;
    std::array<Vec2, 3> grad_;
    std::array<double, 3> elen_;
    double det_;
    double area_;
};

/// Point-evaluation functionals of the linear element: (g(v1), g(v2), g(v3)).
std::array<double, 3> vertex_values(const TriGeom& geom, const ScalarField& g);

}  // namespace enrfem
