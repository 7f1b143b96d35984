#include "elastodpg/layout.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"

using namespace elastodpg;

namespace {

BoundaryLabel left_neumann(const Point2& a, const Point2& b) {
    return (a.x == 0.0 && b.x == 0.0) ? BoundaryLabel::Neumann
                                      : BoundaryLabel::Dirichlet;
}

}  // namespace

TEST_CASE("dof counts on the two-triangle square") {
    const Mesh m = unit_square_mesh(1);
    const SpaceLayout l0 = build_layout(m, 0, 0);
    CHECK_EQ(l0.n_free, 22);  // sigma 8, u 4, flux 10, uhat 0
    CHECK_EQ(l0.test_dims, std::array<int, 3>{18, 12, 1});
    CHECK_EQ(l0.columns_per_element(), 18);

    const SpaceLayout l1 = build_layout(m, 0, 1);
    CHECK_EQ(l1.n_free, 30);  // u block grows to 2*3 per element
    CHECK_EQ(l1.dim_u_mode, 3);

    // All uhat dofs are prescribed on the fully clamped square.
    for (int i = l0.uhat_offset; i < l0.n_total; ++i)
        CHECK_EQ(l0.system_index[i], -1);

    CHECK_THROWS_AS(build_layout(m, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(m, -1, 0), std::invalid_argument);
}

TEST_CASE("closed-form dof counts") {
    for (const int k : {0, 1, 2}) {
        for (const int j : {0, 1}) {
            const Mesh m = unit_square_mesh(3);
            const SpaceLayout lay = build_layout(m, k, j);
            const int nt = m.num_triangles(), ne = m.num_edges(), nv = m.num_vertices();
            const int dk = (k + 1) * (k + 2) / 2;
            const int dkj = (k + j + 1) * (k + j + 2) / 2;
            CHECK_EQ(lay.n_total, 4 * dk * nt + 2 * dkj * nt + 2 * (k + 1) * ne +
                                      2 * nv + 2 * k * ne);
            // Fully Dirichlet: remove every boundary vertex and edge.
            int nbe = 0, nbv = 0;
            std::set<int> bverts;
            for (const Edge& e : m.edges())
                if (e.label != BoundaryLabel::Interior) {
                    nbe++;
                    bverts.insert(e.v[0]);
                    bverts.insert(e.v[1]);
                }
            nbv = static_cast<int>(bverts.size());
            CHECK_EQ(lay.n_free, lay.n_total - 2 * nbv - 2 * k * nbe);
        }
    }
}

TEST_CASE("gather lists are consistent") {
    const Mesh m = relabel_boundary(unit_square_mesh(2), left_neumann);
    const SpaceLayout lay = build_layout(m, 2, 1);

    std::vector<int> refs(lay.n_total, 0);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& dofs = lay.element_dofs[t];
        CHECK_EQ(static_cast<int>(dofs.size()), lay.columns_per_element());
        std::set<int> unique(dofs.begin(), dofs.end());
        CHECK_EQ(unique.size(), dofs.size());
        for (int d : dofs) refs[d]++;
    }
    for (int i = 0; i < lay.n_total; ++i) CHECK(refs[i] >= 1);

    // uhat continuity and flux sign coherence across interior edges.
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        std::vector<std::pair<int, int>> sides;  // (triangle, local edge)
        for (int t = 0; t < m.num_triangles(); ++t)
            for (int le = 0; le < 3; ++le)
                if (m.edge_id(t, le) == e) sides.push_back({t, le});
        if (ed.tri[1] == -1) {
            REQUIRE_EQ(sides.size(), 1);
            CHECK_EQ(lay.flux_sign[sides[0].first][sides[0].second], 1);
            continue;
        }
        REQUIRE_EQ(sides.size(), 2);
        const auto [t0, le0] = sides[0];
        const auto [t1, le1] = sides[1];
        CHECK_EQ(lay.flux_sign[t0][le0] + lay.flux_sign[t1][le1], 0);
        for (int node = 1; node <= lay.k; ++node)
            for (int c = 0; c < 2; ++c)
                CHECK_EQ(lay.element_dofs[t0][lay.col_uhat_edge(le0, node, c)],
                         lay.element_dofs[t1][lay.col_uhat_edge(le1, node, c)]);
        for (int mode = 0; mode <= lay.k; ++mode)
            for (int c = 0; c < 2; ++c)
                CHECK_EQ(lay.element_dofs[t0][lay.col_flux(le0, c, mode)],
                         lay.element_dofs[t1][lay.col_flux(le1, c, mode)]);
    }
}

TEST_CASE("boundary constraints respect labels") {
    const Mesh m = relabel_boundary(unit_square_mesh(2), left_neumann);
    const int k = 1;
    const SpaceLayout lay = build_layout(m, k, 0);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        const bool flux_constrained =
            lay.system_index[lay.flux_offset + e * 2 * (k + 1)] == -1;
        CHECK_EQ(flux_constrained, ed.label == BoundaryLabel::Neumann);
        const bool uhat_constrained =
            lay.system_index[lay.uhat_offset + 2 * m.num_vertices() + e * 2 * k] == -1;
        CHECK_EQ(uhat_constrained, ed.label == BoundaryLabel::Dirichlet);
    }
    // A vertex on the Dirichlet closure is constrained even if it also
    // touches a Neumann edge (corners of the left side).
    for (int v = 0; v < m.num_vertices(); ++v) {
        bool touches_dirichlet = false;
        for (const Edge& ed : m.edges())
            if (ed.label == BoundaryLabel::Dirichlet && (ed.v[0] == v || ed.v[1] == v))
                touches_dirichlet = true;
        CHECK_EQ(lay.system_index[lay.uhat_offset + 2 * v] == -1, touches_dirichlet);
    }
}

TEST_CASE("Dirichlet interpolation fills nodal values") {
    const Mesh m = unit_square_mesh(1);
    const int k = 2;
    SpaceLayout lay = build_layout(m, k, 0);
    auto g = [](Point2 p) { return Eigen::Vector2d(p.x + 2.0 * p.y, p.x - p.y); };
    apply_dirichlet(m, g, lay);

    for (int v = 0; v < m.num_vertices(); ++v) {
        const Point2 p = m.vertices()[v];
        CHECK_EQ(lay.prescribed_value[lay.uhat_offset + 2 * v + 0],
                 doctest::Approx(p.x + 2.0 * p.y).epsilon(1e-14));
        CHECK_EQ(lay.prescribed_value[lay.uhat_offset + 2 * v + 1],
                 doctest::Approx(p.x - p.y).epsilon(1e-14));
    }
    const std::vector<double> nodes = lobatto_nodes_1d(k + 2);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.label != BoundaryLabel::Dirichlet) continue;
        const Point2 lo = m.vertices()[ed.v[0]], hi = m.vertices()[ed.v[1]];
        for (int node = 1; node <= k; ++node) {
            const Point2 p = lo + nodes[node] * (hi - lo);
            const int base = lay.uhat_offset + 2 * m.num_vertices() + e * 2 * k +
                             (node - 1) * 2;
            CHECK_EQ(lay.prescribed_value[base + 0],
                     doctest::Approx(p.x + 2.0 * p.y).epsilon(1e-13));
            CHECK_EQ(lay.prescribed_value[base + 1],
                     doctest::Approx(p.x - p.y).epsilon(1e-13));
        }
    }
    // Interior edge (the diagonal) stays untouched.
    for (int e = 0; e < m.num_edges(); ++e)
        if (m.edges()[e].label == BoundaryLabel::Interior)
            for (int c = 0; c < 2 * k; ++c)
                CHECK_EQ(lay.prescribed_value[lay.uhat_offset + 2 * m.num_vertices() +
                                              e * 2 * k + c],
                         0.0);
}

TEST_CASE("elementwise L2 projection") {
    // P^k functions are reproduced exactly.
    const Mesh m = unit_square_mesh(2);
    const int k = 2;
    auto f = [](Point2 p) { return 1.0 + 2.0 * p.x - p.y + 0.5 * p.x * p.y - p.x * p.x; };
    const Eigen::MatrixXd coeff = l2_project(f, k, m);
    const TriangleBasis basis(k);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> unif(0.05, 0.9);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        for (int s = 0; s < 5; ++s) {
            double rx = unif(rng), ry = unif(rng) * (1.0 - rx);
            const Eigen::MatrixXd v = basis.values({{rx, ry}});
            const double vh = (coeff.row(t) * v.col(0)).value();
            CHECK_EQ(vh, doctest::Approx(f(map.apply({rx, ry}))).epsilon(1e-12));
        }
    }

    // Mean of x² over the reference triangle is 1/6.
    const Mesh ref = Mesh::from_triangles(
        {{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}},
        [](const Point2&, const Point2&) { return BoundaryLabel::Dirichlet; });
    const Eigen::MatrixXd c0 =
        l2_project([](Point2 p) { return p.x * p.x; }, 0, ref);
    CHECK_EQ(c0(0, 0) * std::sqrt(2.0), doctest::Approx(1.0 / 6.0).epsilon(1e-13));

    // Orthogonality of the projection residual against P^k.
    auto smooth = [](Point2 p) {
        return std::sin(std::numbers::pi * p.x) * std::cos(2.0 * p.y);
    };
    const Eigen::MatrixXd cs = l2_project(smooth, k, m);
    const QuadratureRule q = quad_rule(16);
    const Eigen::MatrixXd vals = basis.values(q);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        Eigen::VectorXd resid = Eigen::VectorXd::Zero(basis.dim());
        for (int p = 0; p < q.size(); ++p) {
            const double fv = smooth(map.apply({q.x(p), q.y(p)}));
            const double ph = (cs.row(t) * vals.col(p)).value();
            resid += q.weights[p] * (fv - ph) * vals.col(p);
        }
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
    }
}
