#include "enrfem/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace enrfem {

namespace {

// Rebuilds edges, triangle->edge links and boundary flags from the triangle
// list. Edge numbering is lexicographic by (lo, hi).
void build_connectivity(TriMesh& mesh) {
    std::map<std::pair<int, int>, int> edge_index;
    mesh.edges.clear();
    for (const auto& tr : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = tr[cyc3(k + 1)];
            const int b = tr[cyc3(k + 2)];
            edge_index.emplace(std::minmax(a, b), -1);
        }
    }
    int idx = 0;
    for (auto& [key, val] : edge_index) {
        val = idx++;
        MeshEdge e;
        e.lo = key.first;
        e.hi = key.second;
        mesh.edges.push_back(e);
    }

    mesh.tri_edges.assign(mesh.triangles.size(), {-1, -1, -1});
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int e = edge_index.at(std::minmax(tr[cyc3(k + 1)], tr[cyc3(k + 2)]));
            mesh.tri_edges[t][k] = e;
            auto& adj = mesh.edges[e].tri;
            if (adj[0] < 0)
                adj[0] = t;
            else if (adj[1] < 0)
                adj[1] = t;
            else
                throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }

    mesh.boundary_vertex.assign(mesh.vertices.size(), false);
    for (auto& e : mesh.edges) {
        e.boundary = e.tri[1] < 0;
        if (e.boundary) {
            mesh.boundary_vertex[e.lo] = true;
            mesh.boundary_vertex[e.hi] = true;
        }
    }
}

}  // namespace

TriMesh friedrichs_keller(int n) {
    if (n < 1) throw std::invalid_argument("friedrichs_keller: n must be >= 1");
    TriMesh mesh;
    mesh.level = 0;
    mesh.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.emplace_back(double(i) / n, double(j) / n);

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.triangles.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int bl = vid(i, j), br = vid(i + 1, j);
            const int tl = vid(i, j + 1), tr = vid(i + 1, j + 1);
            mesh.triangles.push_back({bl, br, tr});  // below the bl->tr diagonal
            mesh.triangles.push_back({bl, tr, tl});  // above it
        }
    }
    build_connectivity(mesh);
    return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh) {
    TriMesh fine;
    fine.level = mesh.level + 1;
    fine.vertices = mesh.vertices;
    fine.vertices.reserve(mesh.vertices.size() + mesh.edges.size());
    for (const auto& e : mesh.edges)
        fine.vertices.push_back(0.5 * (mesh.vertices[e.lo] + mesh.vertices[e.hi]));

    const int nv = mesh.n_vertices();
    fine.triangles.reserve(4 * mesh.triangles.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        // m[k] is the midpoint of the edge opposite local vertex k.
        const std::array<int, 3> m = {nv + mesh.tri_edges[t][0], nv + mesh.tri_edges[t][1],
                                      nv + mesh.tri_edges[t][2]};
        fine.triangles.push_back({tr[0], m[2], m[1]});
        fine.triangles.push_back({m[2], tr[1], m[0]});
        fine.triangles.push_back({m[1], m[0], tr[2]});
        fine.triangles.push_back({m[0], m[1], m[2]});
    }
    build_connectivity(fine);
    return fine;
}

MeshMetrics metrics(const TriMesh& mesh) {
    MeshMetrics m;
    m.h_elem.resize(mesh.triangles.size());
    m.rho_elem.resize(mesh.triangles.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tr[0]];
        const Vec2& b = mesh.vertices[tr[1]];
        const Vec2& c = mesh.vertices[tr[2]];
        const double area = 0.5 * cross2(b - a, c - a);
        if (!(area > 0.0))
            throw std::runtime_error("metrics: degenerate triangle " + std::to_string(t));
        const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
        m.h_elem[t] = std::max({la, lb, lc});
        m.rho_elem[t] = 2.0 * area / (0.5 * (la + lb + lc));
        m.h = std::max(m.h, m.h_elem[t]);
        m.regularity_ratio = std::max(m.regularity_ratio, m.h_elem[t] / m.rho_elem[t]);
    }
    return m;
}

void write_mesh(const TriMesh& mesh, std::ostream& os) {
    os << mesh.n_vertices() << ' ' << mesh.n_edges() << ' ' << mesh.n_triangles() << '\n';
    char buf[64];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g", v.x(), v.y());
        os << buf << '\n';
    }
    for (const auto& tr : mesh.triangles)
        os << tr[0] << ' ' << tr[1] << ' ' << tr[2] << '\n';
}

TriMesh read_mesh(std::istream& is) {
    TriMesh mesh;
    int nv = 0, ne = 0, nt = 0;
    if (!(is >> nv >> ne >> nt) || nv < 3 || nt < 1)
        throw std::runtime_error("read_mesh: bad header");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices)
        if (!(is >> v.x() >> v.y())) throw std::runtime_error("read_mesh: bad vertex line");
    mesh.triangles.resize(nt);
    for (auto& tr : mesh.triangles) {
        if (!(is >> tr[0] >> tr[1] >> tr[2])) throw std::runtime_error("read_mesh: bad triangle line");
        for (int v : tr)
            if (v < 0 || v >= nv) throw std::runtime_error("read_mesh: vertex index out of range");
        const double s = cross2(mesh.vertices[tr[1]] - mesh.vertices[tr[0]],
                                mesh.vertices[tr[2]] - mesh.vertices[tr[0]]);
        if (!(s > 0.0)) throw std::runtime_error("read_mesh: triangle not counter-clockwise");
    }
    build_connectivity(mesh);
    if (mesh.n_edges() != ne) throw std::runtime_error("read_mesh: edge count mismatch");
    return mesh;
}

}  // namespace enrfem
