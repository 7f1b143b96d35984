#include "elastodpg/layout.hpp"

#include <algorithm>
#include <stdexcept>

#include "elastodpg/quadrature.hpp"

namespace elastodpg {

SpaceLayout build_layout(const Mesh& m, int k, int j) {
    if (k < 0 || (j != 0 && j != 1))
        throw std::invalid_argument("build_layout: need k >= 0 and j in {0,1}");
    SpaceLayout lay;
    lay.k = k;
    lay.j = j;
    lay.dim_sigma_mode = triangle_space_dim(k);
    lay.dim_u_mode = triangle_space_dim(k + j);
    const int dim_test = triangle_space_dim(k + 2);
    lay.test_dims = {3 * dim_test, 2 * dim_test, triangle_space_dim(k)};

    const int nt = m.num_triangles();
    const int ne = m.num_edges();
    const int nv = m.num_vertices();
    lay.sigma_offset = 0;
    lay.u_offset = 4 * lay.dim_sigma_mode * nt;
    lay.flux_offset = lay.u_offset + 2 * lay.dim_u_mode * nt;
    lay.uhat_offset = lay.flux_offset + 2 * (k + 1) * ne;
    lay.n_total = lay.uhat_offset + 2 * nv + 2 * k * ne;

    // Constraint flags: uhat vanishes on (or is prescribed along) the
    // Dirichlet closure, the flux on Neumann edges.
    std::vector<char> constrained(lay.n_total, 0);
    for (int e = 0; e < ne; ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.label == BoundaryLabel::Neumann)
            for (int c = 0; c < 2 * (k + 1); ++c)
                constrained[lay.flux_offset + e * 2 * (k + 1) + c] = 1;
        if (ed.label == BoundaryLabel::Dirichlet) {
            for (int v : ed.v)
                for (int c = 0; c < 2; ++c)
                    constrained[lay.uhat_offset + 2 * v + c] = 1;
            for (int c = 0; c < 2 * k; ++c)
                constrained[lay.uhat_offset + 2 * nv + e * 2 * k + c] = 1;
        }
    }

    lay.system_index.assign(lay.n_total, -1);
    lay.prescribed_value.assign(lay.n_total, 0.0);
    lay.n_free = 0;
    for (int i = 0; i < lay.n_total; ++i)
        if (!constrained[i]) lay.system_index[i] = lay.n_free++;

    lay.element_dofs.resize(nt);
    lay.flux_sign.resize(nt);
    for (int t = 0; t < nt; ++t) {
        std::vector<int>& dofs = lay.element_dofs[t];
        dofs.resize(lay.columns_per_element());
        int col = 0;
        for (int c = 0; c < 4; ++c)
            for (int mo = 0; mo < lay.dim_sigma_mode; ++mo)
                dofs[col++] = lay.sigma_offset + t * 4 * lay.dim_sigma_mode +
                              c * lay.dim_sigma_mode + mo;
        for (int c = 0; c < 2; ++c)
            for (int mo = 0; mo < lay.dim_u_mode; ++mo)
                dofs[col++] =
                    lay.u_offset + t * 2 * lay.dim_u_mode + c * lay.dim_u_mode + mo;
        for (int e = 0; e < 3; ++e) {
            const int ge = m.edge_id(t, e);
            lay.flux_sign[t][e] = m.orientation(t, e);
            for (int c = 0; c < 2; ++c)
                for (int mo = 0; mo <= k; ++mo)
                    dofs[col++] =
                        lay.flux_offset + ge * 2 * (k + 1) + c * (k + 1) + mo;
        }
        for (int w = 0; w < 3; ++w)
            for (int c = 0; c < 2; ++c)
                dofs[col++] = lay.uhat_offset + 2 * m.triangles()[t].v[w] + c;
        for (int e = 0; e < 3; ++e) {
            const int ge = m.edge_id(t, e);
            for (int node = 1; node <= k; ++node)
                for (int c = 0; c < 2; ++c)
                    dofs[col++] = lay.uhat_offset + 2 * nv + ge * 2 * k +
                                  (node - 1) * 2 + c;
        }
    }
    return lay;
}

void apply_dirichlet(const Mesh& m,
                     const std::function<Eigen::Vector2d(Point2)>& g,
                     SpaceLayout& lay) {
    if (!g) return;  // homogeneous: prescribed values stay zero
    const int k = lay.k;
    const int nv = m.num_vertices();
    const std::vector<double> nodes = lobatto_nodes_1d(k + 2);
    for (int e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        if (ed.label != BoundaryLabel::Dirichlet) continue;
        const Point2 lo = m.vertices()[ed.v[0]];
        const Point2 hi = m.vertices()[ed.v[1]];
        for (int c = 0; c < 2; ++c) {
            lay.prescribed_value[lay.uhat_offset + 2 * ed.v[0] + c] = g(lo)(c);
            lay.prescribed_value[lay.uhat_offset + 2 * ed.v[1] + c] = g(hi)(c);
        }
        for (int node = 1; node <= k; ++node) {
            const Point2 p = lo + nodes[node] * (hi - lo);
            for (int c = 0; c < 2; ++c)
                lay.prescribed_value[lay.uhat_offset + 2 * nv + e * 2 * k +
                                     (node - 1) * 2 + c] = g(p)(c);
        }
    }
}

Eigen::MatrixXd l2_project(const std::function<double(Point2)>& f, int k,
                           const Mesh& m) {
    const TriangleBasis basis(k);
    const QuadratureRule q = quad_rule(std::min(2 * (k + 2) + 6, 20));
    const Eigen::MatrixXd v = basis.values(q);
    Eigen::MatrixXd coeff(m.num_triangles(), basis.dim());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
        for (int p = 0; p < q.size(); ++p)
            c += q.weights[p] * f(map.apply({q.x(p), q.y(p)})) * v.col(p);
        // Orthonormal reference basis: quadrature of f phi_i in reference
        // measure is already the coefficient.
        coeff.row(t) = c.transpose();
    }
    return coeff;
}

}  // namespace elastodpg
