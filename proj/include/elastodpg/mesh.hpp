#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace elastodpg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

enum class BoundaryLabel { Interior, Dirichlet, Neumann };

/// Triangle with counterclockwise vertex order. Local edge i is the edge
/// opposite vertex i, i.e. edge i connects vertices (i+1)%3 and (i+2)%3.
struct Triangle {
    std::array<int, 3> v{-1, -1, -1};
    int refinement_edge = -1;
    int parent = -1;
};

struct Edge {
    std::array<int, 2> v{-1, -1};  // sorted, v[0] < v[1]
    BoundaryLabel label = BoundaryLabel::Interior;
    std::array<int, 2> tri{-1, -1};  // adjacent triangles; tri[1] == -1 on the boundary
    Point2 normal{};                 // unit normal; outward on boundary edges
    double length = 0.0;
};

/// Assigns a label to a boundary edge given its two endpoints.
using BoundaryLabeler =
    std::function<BoundaryLabel(const Point2&, const Point2&)>;

/// Conforming 2D simplicial triangulation. Immutable after construction;
/// refinement produces a new mesh.
class Mesh {
public:
    /// Builds the full edge/adjacency structure from a triangle soup.
    /// Boundary edges are labeled via `label` (never called for interior
    /// edges). Throws on inverted or degenerate triangles and on edges
    /// shared by more than two triangles. Triangles with refinement_edge
    /// == -1 get the longest edge assigned (ties by lowest global edge id).
    static Mesh from_triangles(std::vector<Point2> vertices,
                               std::vector<Triangle> triangles,
                               const BoundaryLabeler& label);

    const std::vector<Point2>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return edges_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Point2& vertex(int t, int local) const {
        return vertices_[triangles_[t].v[local]];
    }

    /// Global edge id of local edge `local` of triangle `t`.
    int edge_id(int t, int local) const { return tri_edges_[t][local]; }

    /// +1 iff the outward normal of triangle `t` on its local edge equals
    /// the stored global edge normal, -1 otherwise.
    int orientation(int t, int local) const { return tri_edge_sign_[t][local]; }

    double area(int t) const;
    double total_area() const;
    Point2 centroid(int t) const;
    /// Longest edge of triangle `t`.
    double diameter(int t) const;
    double h_max() const;

private:
    friend Mesh uniform_refine(const Mesh&);
    friend Mesh bisect(const Mesh&, const std::vector<int>&);

    /// Same as from_triangles but labels boundary edges by their sorted
    /// vertex ids, which refinement uses for exact label inheritance.
    static Mesh build(std::vector<Point2> vertices,
                      std::vector<Triangle> triangles,
                      const std::function<BoundaryLabel(int, int)>& label);

    std::vector<Point2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::array<int, 3>> tri_edge_sign_;
};

/// Structured mesh of the unit square (0,1)^2 with 2*n^2 triangles; every
/// grid cell is split along its bottom-left to top-right diagonal. All
/// boundary edges are Dirichlet.
Mesh unit_square_mesh(int n);

/// Coarse 6-triangle mesh of the L-shape (-1,1)^2 \ [0,1]x[-1,0] with the
/// re-entrant corner at the origin. All boundary edges are Dirichlet.
Mesh l_shape_mesh();

/// Red refinement: every triangle is split into four similar children via
/// the edge midpoints. Boundary labels are inherited.
Mesh uniform_refine(const Mesh& m);

/// Newest-vertex bisection of the marked triangles plus the completion
/// bisections needed to keep the mesh conforming. Children place their
/// refinement edge opposite the newly created vertex.
Mesh bisect(const Mesh& m, const std::vector<int>& marked);

/// Rebuilds the mesh with boundary labels reassigned by `label`.
Mesh relabel_boundary(const Mesh& m, const BoundaryLabeler& label);

/// Plain-text dump (one line per vertex / triangle / boundary edge), for
/// debugging.
std::string dump(const Mesh& m);

}  // namespace elastodpg
