#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace pme {

// Structured triangulation of the unit square. (n+1)^2 nodes in row-major
// (lexicographic) order; every grid cell is split along the bottom-left to
// top-right diagonal, giving 2n^2 counterclockwise triangles.
struct Mesh {
    int n = 0;
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> boundary_mask;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    double h() const { return 1.0 / n; }
};

inline Mesh build_unit_square_mesh(int n) {
    if (n < 1) {
        throw std::invalid_argument("build_unit_square_mesh: n must be >= 1");
    }
    Mesh m;
    m.n = n;
    const int np = n + 1;
    m.nodes.reserve(static_cast<std::size_t>(np) * np);
    m.boundary_mask.assign(static_cast<std::size_t>(np) * np, false);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            m.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            if (i == 0 || j == 0 || i == n || j == n) {
                m.boundary_mask[static_cast<std::size_t>(j) * np + i] = true;
            }
        }
    }
    auto id = [np](int i, int j) { return j * np + i; };
    m.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = id(i, j);
            const int v10 = id(i + 1, j);
            const int v01 = id(i, j + 1);
            const int v11 = id(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }
    return m;
}

// Indices of non-boundary nodes, ascending.
inline std::vector<int> interior_nodes(const Mesh& m) {
    std::vector<int> out;
    for (int i = 0; i < m.node_count(); ++i) {
        if (!m.boundary_mask[i]) out.push_back(i);
    }
    return out;
}

inline std::vector<int> boundary_nodes(const Mesh& m) {
    std::vector<int> out;
    for (int i = 0; i < m.node_count(); ++i) {
        if (m.boundary_mask[i]) out.push_back(i);
    }
    return out;
}

inline double triangle_signed_area(const Mesh& m, int t) {
    const auto& tri = m.triangles[t];
    const auto& p0 = m.nodes[tri[0]];
    const auto& p1 = m.nodes[tri[1]];
    const auto& p2 = m.nodes[tri[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

}  // namespace pme
