#pragma once

#include "enrfem/geometry.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace enrfem {

/// Mesh edge with canonical orientation from the lower to the higher global
/// vertex index. Interior edges have two adjacent triangles, boundary edges one.
struct MeshEdge {
    int lo = -1;
    int hi = -1;
    std::array<int, 2> tri{-1, -1};
    bool boundary = false;
};

/// Indexed triangulation of the unit square (or an imported domain).
/// Triangles are counter-clockwise; edges are numbered lexicographically by
/// (lo, hi) so all derived outputs are reproducible byte for byte.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<MeshEdge> edges;
    std::vector<std::array<int, 3>> tri_edges;  // tri_edges[t][k]: edge opposite local vertex k
    std::vector<bool> boundary_vertex;
    int level = 0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    TriGeom geom(int t) const {
        const auto& tr = triangles[t];
        return TriGeom(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
    }

    /// flips[k] is true when the local parametrization of edge k of triangle t
    /// (t=1 at local vertex k+1) runs against the canonical lo->hi direction.
    std::array<bool, 3> edge_flips(int t) const {
        const auto& tr = triangles[t];
        std::array<bool, 3> f{};
        for (int k = 0; k < 3; ++k) f[k] = tr[cyc3(k + 1)] < tr[cyc3(k + 2)];
        return f;
    }
};

struct MeshMetrics {
    double h = 0.0;                          // max element diameter
    std::vector<double> h_elem;              // per-element diameter (longest edge)
    std::vector<double> rho_elem;            // inscribed-circle diameter 2*area/semiperimeter
    double regularity_ratio = 0.0;           // max h_E / rho_E
};

/// n x n grid of squares, each split along the bottom-left -> top-right
/// diagonal: (n+1)^2 vertices, 2n^2 triangles, 2n(n+1)+n^2 edges.
TriMesh friedrichs_keller(int n);

/// Red refinement: every triangle is replaced by four similar children.
/// Parent vertices keep their indices; midpoint of parent edge e becomes
/// vertex n_parent_vertices + e.
TriMesh refine_uniform(const TriMesh& mesh);

MeshMetrics metrics(const TriMesh& mesh);

/// Plain-text format: header "V E T", then V vertex lines (17 significant
/// digits), then T triangle index triples.
void write_mesh(const TriMesh& mesh, std::ostream& os);
TriMesh read_mesh(std::istream& is);

}  // namespace enrfem
