#include "elastodpg/mesh.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace elastodpg {

namespace {

double signed_area2(const Point2& a, const Point2& b, const Point2& c) {
    return cross(b - a, c - a);
}

std::pair<int, int> sorted_pair(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

// Rotation by -90 degrees; maps the CCW traversal direction of a triangle
// edge to the triangle's outward normal.
Point2 rot_cw(Point2 d) { return {d.y, -d.x}; }

// A vertex strictly inside another boundary edge means a hanging node. Only
// boundary edges can hide one: the short side of a nonconforming split has
// no second neighbor, so it shows up here as (fake) boundary.
void audit_hanging_nodes(const std::vector<Point2>& vertices,
                         const std::vector<Edge>& edges) {
    std::vector<int> boundary_edges;
    std::vector<char> on_boundary(vertices.size(), 0);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (edges[e].tri[1] != -1) continue;
        boundary_edges.push_back(e);
        on_boundary[edges[e].v[0]] = 1;
        on_boundary[edges[e].v[1]] = 1;
    }
    for (int e : boundary_edges) {
        const Edge& ed = edges[e];
        const Point2 a = vertices[ed.v[0]];
        const Point2 d = vertices[ed.v[1]] - a;
        const double len2 = dot(d, d);
        for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
            if (!on_boundary[v] || v == ed.v[0] || v == ed.v[1]) continue;
            const Point2 r = vertices[v] - a;
            const double t = dot(r, d) / len2;
            if (t < 1e-9 || t > 1.0 - 1e-9) continue;
            const Point2 gap = r - t * d;
            if (norm(gap) < 1e-10 * ed.length)
                throw std::invalid_argument("mesh is not conforming: vertex " +
                                            std::to_string(v) +
                                            " hangs on edge " + std::to_string(e));
        }
    }
}

}  // namespace

Mesh Mesh::build(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                 const std::function<BoundaryLabel(int, int)>& label) {
    const int nv = static_cast<int>(vertices.size());
    for (const Point2& p : vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("mesh vertex with non-finite coordinates");

    std::map<std::pair<int, int>, int> edge_of_pair;
    std::vector<Edge> edges;
    std::vector<std::array<int, 3>> tri_edges(triangles.size());
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        const Triangle& tri = triangles[t];
        for (int v : tri.v)
            if (v < 0 || v >= nv)
                throw std::invalid_argument("triangle " + std::to_string(t) +
                                            " has vertex id out of range");
        if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[0] == tri.v[2])
            throw std::invalid_argument("triangle " + std::to_string(t) +
                                        " has repeated vertices");
        if (signed_area2(vertices[tri.v[0]], vertices[tri.v[1]],
                         vertices[tri.v[2]]) <= 0.0)
            throw std::invalid_argument("triangle " + std::to_string(t) +
                                        " is not counterclockwise");
        if (tri.refinement_edge < -1 || tri.refinement_edge > 2)
            throw std::invalid_argument("triangle " + std::to_string(t) +
                                        " has invalid refinement edge");
        for (int k = 0; k < 3; ++k) {
            const auto key = sorted_pair(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
            auto [it, inserted] = edge_of_pair.try_emplace(key, static_cast<int>(edges.size()));
            if (inserted) {
                Edge e;
                e.v = {key.first, key.second};
                edges.push_back(e);
            }
            Edge& e = edges[it->second];
            if (e.tri[0] == -1)
                e.tri[0] = t;
            else if (e.tri[1] == -1)
                e.tri[1] = t;
            else
                throw std::invalid_argument("edge shared by more than two triangles");
            tri_edges[t][k] = it->second;
        }
    }

    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        Edge& e = edges[i];
        const Point2 d = vertices[e.v[1]] - vertices[e.v[0]];
        e.length = norm(d);
        e.normal = (1.0 / e.length) * rot_cw(d);
        if (e.tri[1] != -1) continue;
        // Boundary: orient outward (relative to the single neighbor) and label.
        const Triangle& tri = triangles[e.tri[0]];
        for (int k = 0; k < 3; ++k) {
            if (tri_edges[e.tri[0]][k] != i) continue;
            const Point2 trav = vertices[tri.v[(k + 2) % 3]] - vertices[tri.v[(k + 1) % 3]];
            if (dot(rot_cw(trav), e.normal) < 0.0) e.normal = -1.0 * e.normal;
            break;
        }
        e.label = label(e.v[0], e.v[1]);
        if (e.label == BoundaryLabel::Interior)
            throw std::invalid_argument("boundary edge " + std::to_string(i) +
                                        " labeled Interior");
    }

    audit_hanging_nodes(vertices, edges);

    std::vector<std::array<int, 3>> tri_sign(triangles.size());
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        const Triangle& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            const Point2 trav = vertices[tri.v[(k + 2) % 3]] - vertices[tri.v[(k + 1) % 3]];
            tri_sign[t][k] =
                dot(rot_cw(trav), edges[tri_edges[t][k]].normal) > 0.0 ? 1 : -1;
        }
    }

    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        if (triangles[t].refinement_edge != -1) continue;
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            const double lk = edges[tri_edges[t][k]].length;
            const double lb = edges[tri_edges[t][best]].length;
            if (lk > lb || (lk == lb && tri_edges[t][k] < tri_edges[t][best]))
                best = k;
        }
        triangles[t].refinement_edge = best;
    }

    Mesh m;
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    m.edges_ = std::move(edges);
    m.tri_edges_ = std::move(tri_edges);
    m.tri_edge_sign_ = std::move(tri_sign);
    return m;
}

Mesh Mesh::from_triangles(std::vector<Point2> vertices,
                          std::vector<Triangle> triangles,
                          const BoundaryLabeler& label) {
    auto by_ids = [&label, &vertices](int a, int b) {
        return label(vertices[a], vertices[b]);
    };
    // Pass vertices by copy: the labeler above still reads the local vector.
    return build(vertices, std::move(triangles), by_ids);
}

double Mesh::area(int t) const {
    const Triangle& tri = triangles_[t];
    return 0.5 * signed_area2(vertices_[tri.v[0]], vertices_[tri.v[1]],
                              vertices_[tri.v[2]]);
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t) sum += area(t);
    return sum;
}

Point2 Mesh::centroid(int t) const {
    const Triangle& tri = triangles_[t];
    return (1.0 / 3.0) * (vertices_[tri.v[0]] + vertices_[tri.v[1]] + vertices_[tri.v[2]]);
}

double Mesh::diameter(int t) const {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, edges_[tri_edges_[t][k]].length);
    return d;
}

double Mesh::h_max() const {
    double h = 0.0;
    for (const Edge& e : edges_) h = std::max(h, e.length);
    return h;
}

Mesh unit_square_mesh(int n) {
    if (n < 1) throw std::invalid_argument("unit_square_mesh: n must be positive");
    std::vector<Point2> vertices;
    vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<Triangle> tris;
    tris.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            // Split along the bottom-left to top-right diagonal.
            tris.push_back({{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}});
            tris.push_back({{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}});
        }
    return Mesh::from_triangles(
        std::move(vertices), std::move(tris),
        [](const Point2&, const Point2&) { return BoundaryLabel::Dirichlet; });
}

Mesh l_shape_mesh() {
    // (-1,1)^2 minus the fourth quadrant; re-entrant corner at vertex 3.
    std::vector<Point2> vertices = {{-1.0, -1.0}, {0.0, -1.0}, {-1.0, 0.0},
                                    {0.0, 0.0},   {1.0, 0.0},  {-1.0, 1.0},
                                    {0.0, 1.0},   {1.0, 1.0}};
    std::vector<Triangle> tris = {{{0, 1, 3}}, {{0, 3, 2}}, {{2, 3, 6}},
                                  {{2, 6, 5}}, {{3, 4, 7}}, {{3, 7, 6}}};
    return Mesh::from_triangles(
        std::move(vertices), std::move(tris),
        [](const Point2&, const Point2&) { return BoundaryLabel::Dirichlet; });
}

Mesh uniform_refine(const Mesh& m) {
    std::vector<Point2> vertices = m.vertices();
    std::vector<int> mid(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        mid[e] = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (m.vertices()[ed.v[0]] + m.vertices()[ed.v[1]]));
    }

    std::vector<Triangle> tris;
    tris.reserve(4 * m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& v = m.triangles()[t].v;
        const int m0 = mid[m.edge_id(t, 0)];
        const int m1 = mid[m.edge_id(t, 1)];
        const int m2 = mid[m.edge_id(t, 2)];
        for (auto child : {std::array{v[0], m2, m1}, std::array{m2, v[1], m0},
                           std::array{m1, m0, v[2]}, std::array{m2, m0, m1}})
            tris.push_back({child, -1, t});
    }

    std::map<std::pair<int, int>, BoundaryLabel> inherited;
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.label == BoundaryLabel::Interior) continue;
        inherited[sorted_pair(ed.v[0], mid[e])] = ed.label;
        inherited[sorted_pair(mid[e], ed.v[1])] = ed.label;
    }
    auto label = [&inherited](int a, int b) {
        auto it = inherited.find(sorted_pair(a, b));
        if (it == inherited.end())
            throw std::logic_error("refined boundary edge without a parent label");
        return it->second;
    };
    return Mesh::build(std::move(vertices), std::move(tris), label);
}

Mesh bisect(const Mesh& m, const std::vector<int>& marked) {
    std::vector<char> edge_marked(m.num_edges(), 0);
    auto refinement_gid = [&m](int t) {
        return m.edge_id(t, m.triangles()[t].refinement_edge);
    };
    for (int t : marked) {
        if (t < 0 || t >= m.num_triangles())
            throw std::out_of_range("bisect: marked triangle id out of range");
        edge_marked[refinement_gid(t)] = 1;
    }
    // Completion closure: a triangle with any marked edge must split along
    // its refinement edge, which may mark further edges in the neighbors.
    for (bool changed = true; changed;) {
        changed = false;
        for (int t = 0; t < m.num_triangles(); ++t) {
            if (edge_marked[refinement_gid(t)]) continue;
            for (int k = 0; k < 3; ++k)
                if (edge_marked[m.edge_id(t, k)]) {
                    edge_marked[refinement_gid(t)] = 1;
                    changed = true;
                    break;
                }
        }
    }
    if (std::none_of(edge_marked.begin(), edge_marked.end(),
                     [](char c) { return c != 0; }))
        return m;

    std::vector<Point2> vertices = m.vertices();
    std::map<std::pair<int, int>, int> midpoint;
    for (int e = 0; e < m.num_edges(); ++e) {
        if (!edge_marked[e]) continue;
        const Edge& ed = m.edges()[e];
        midpoint[sorted_pair(ed.v[0], ed.v[1])] = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (m.vertices()[ed.v[0]] + m.vertices()[ed.v[1]]));
    }

    std::vector<Triangle> tris;
    // Bisection of (w0,w1,w2) at refinement edge r inserts the midpoint v of
    // the edge opposite w_r; both children get their refinement edge opposite
    // v. Recursion covers edges split by the neighbors' closure.
    auto emit = [&](auto&& self, std::array<int, 3> w, int r, int parent) -> void {
        const int a = w[(r + 1) % 3];
        const int b = w[(r + 2) % 3];
        const auto it = midpoint.find(sorted_pair(a, b));
        if (it == midpoint.end()) {
            tris.push_back({w, r, parent});
            return;
        }
        self(self, {w[r], a, it->second}, 2, parent);
        self(self, {w[r], it->second, b}, 1, parent);
    };
    for (int t = 0; t < m.num_triangles(); ++t)
        emit(emit, m.triangles()[t].v, m.triangles()[t].refinement_edge, t);

    std::map<std::pair<int, int>, BoundaryLabel> inherited;
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.label == BoundaryLabel::Interior) continue;
        if (edge_marked[e]) {
            const int v = midpoint.at(sorted_pair(ed.v[0], ed.v[1]));
            inherited[sorted_pair(ed.v[0], v)] = ed.label;
            inherited[sorted_pair(v, ed.v[1])] = ed.label;
        } else {
            inherited[sorted_pair(ed.v[0], ed.v[1])] = ed.label;
        }
    }
    auto label = [&inherited](int a, int b) {
        auto it = inherited.find(sorted_pair(a, b));
        if (it == inherited.end())
            throw std::logic_error("bisected boundary edge without a parent label");
        return it->second;
    };
    return Mesh::build(std::move(vertices), std::move(tris), label);
}

Mesh relabel_boundary(const Mesh& m, const BoundaryLabeler& label) {
    return Mesh::from_triangles(m.vertices(), m.triangles(), label);
}

std::string dump(const Mesh& m) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const Point2& p : m.vertices()) out << "v " << p.x << ' ' << p.y << '\n';
    for (const Triangle& t : m.triangles())
        out << "t " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
    for (const Edge& e : m.edges()) {
        if (e.label == BoundaryLabel::Interior) continue;
        out << "b " << e.v[0] << ' ' << e.v[1] << ' '
            << (e.label == BoundaryLabel::Dirichlet ? "Dirichlet" : "Neumann")
            << '\n';
    }
    return out.str();
}

}  // namespace elastodpg
