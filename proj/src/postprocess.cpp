#include "elastodpg/postprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace elastodpg {

namespace {

constexpr int kRmQuadDegree = 12;

}  // namespace

Eigen::Vector3d rm_project_values(const Mesh& m, int t, const QuadratureRule& q,
                                  const Eigen::MatrixXd& vals) {
    const AffineMap map = affine_map(m, t);
    const Point2 cen = m.centroid(t);
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, g3 = 0.0;
    for (int p = 0; p < q.size(); ++p) {
        const Point2 x = map.apply({q.x(p), q.y(p)});
        const double w = map.det * q.weights[p];
        const double rx = -(x.y - cen.y), ry = x.x - cen.x;
        a1 += w * vals(0, p);
        a2 += w * vals(1, p);
        a3 += w * (rx * vals(0, p) + ry * vals(1, p));
        g3 += w * (rx * rx + ry * ry);
    }
    const double area = m.area(t);
    return {a1 / area, a2 / area, a3 / g3};
}

Eigen::Vector3d rm_project(const Mesh& m, int t,
                           const std::function<Eigen::Vector2d(Point2)>& v) {
    const QuadratureRule q = quad_rule(kRmQuadDegree);
    const AffineMap map = affine_map(m, t);
    Eigen::MatrixXd vals(2, q.size());
    for (int p = 0; p < q.size(); ++p)
        vals.col(p) = v(map.apply({q.x(p), q.y(p)}));
    return rm_project_values(m, t, q, vals);
}

PostprocessResult postprocess(const Mesh& m, const SpaceLayout& lay,
                              const SolutionFields& sol, const LameParams& p,
                              int threads) {
    const int k = lay.k;
    const int dim = triangle_space_dim(k + 1);
    const int n = 2 * dim;
    const QuadratureRule q = quad_rule(std::min(2 * (k + 2) + 2, 20));
    const TriangleBasis pb(k + 1);
    const Eigen::MatrixXd pv = pb.values(q);
    Eigen::MatrixXd pdr, pds;
    pb.gradients(q, pdr, pds);
    const Eigen::MatrixXd sig_tab = TriangleBasis(k).values(q);
    const Eigen::MatrixXd u_tab = TriangleBasis(k + lay.j).values(q);

    PostprocessResult out;
    out.degree = k + 1;
    out.coeffs.resize(m.num_triangles(), n);

    parallel_for_chunks(m.num_triangles(), threads, [&](int lo, int hi, int) {
        for (int t = lo; t < hi; ++t) {
            const AffineMap map = affine_map(m, t);
            const Point2 cen = m.centroid(t);
            const Eigen::Matrix2d jit = map.Jinv.transpose();
            const Eigen::MatrixXd dx = jit(0, 0) * pdr + jit(0, 1) * pds;
            const Eigen::MatrixXd dy = jit(1, 0) * pdr + jit(1, 1) * pds;
            Eigen::VectorXd w =
                map.det *
                Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());

            const Eigen::MatrixXd kxx = dx * w.asDiagonal() * dx.transpose();
            const Eigen::MatrixXd kxy = dx * w.asDiagonal() * dy.transpose();
            const Eigen::MatrixXd kyy = dy * w.asDiagonal() * dy.transpose();

            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 3, n + 3);
            A.block(0, 0, dim, dim) = kxx + 0.5 * kyy;
            A.block(0, dim, dim, dim) = 0.5 * kxy.transpose();
            A.block(dim, 0, dim, dim) = 0.5 * kxy;
            A.block(dim, dim, dim, dim) = kyy + 0.5 * kxx;

            // RM constraint rows: translations and the centered rotation
            const Eigen::VectorXd mass = pv * w;
            Eigen::VectorXd mx = Eigen::VectorXd::Zero(dim);
            Eigen::VectorXd my = Eigen::VectorXd::Zero(dim);
            for (int pq = 0; pq < q.size(); ++pq) {
                const Point2 x = map.apply({q.x(pq), q.y(pq)});
                mx += w(pq) * (x.x - cen.x) * pv.col(pq);
                my += w(pq) * (x.y - cen.y) * pv.col(pq);
            }
            Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, n);
            C.block(0, 0, 1, dim) = mass.transpose();
            C.block(1, dim, 1, dim) = mass.transpose();
            C.block(2, 0, 1, dim) = -my.transpose();
            C.block(2, dim, 1, dim) = mx.transpose();
            A.block(n, 0, 3, n) = C;
            A.block(0, n, n, 3) = C.transpose();

            // right side: (A sigma_h, eps(phi)) and the RM moments of u_h
            const Eigen::MatrixXd sh = sigma_values(lay, sol.coeffs, t, sig_tab);
            const Eigen::MatrixXd uh = u_values(lay, sol.coeffs, t, u_tab);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
            for (int pq = 0; pq < q.size(); ++pq) {
                Eigen::Matrix2d s;
                s << sh(0, pq), sh(1, pq), sh(2, pq), sh(3, pq);
                const Eigen::Matrix2d a = compliance_apply(s, p);
                const Eigen::Matrix2d e = 0.5 * (a + a.transpose());
                rhs.segment(0, dim) +=
                    w(pq) * (e(0, 0) * dx.col(pq) + e(0, 1) * dy.col(pq));
                rhs.segment(dim, dim) +=
                    w(pq) * (e(1, 0) * dx.col(pq) + e(1, 1) * dy.col(pq));
                const Point2 x = map.apply({q.x(pq), q.y(pq)});
                rhs(n + 0) += w(pq) * uh(0, pq);
                rhs(n + 1) += w(pq) * uh(1, pq);
                rhs(n + 2) += w(pq) * (-(x.y - cen.y) * uh(0, pq) +
                                       (x.x - cen.x) * uh(1, pq));
            }

            const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if (!lu.isInvertible())
                throw std::runtime_error("postprocess: singular saddle system");
            out.coeffs.row(t) = lu.solve(rhs).head(n).transpose();
        }
    });
    return out;
}

Eigen::MatrixXd post_values(const PostprocessResult& pr, int t,
                            const Eigen::MatrixXd& basis_at_pts) {
    const int dim = static_cast<int>(basis_at_pts.rows());
    Eigen::MatrixXd out(2, basis_at_pts.cols());
    out.row(0) = pr.coeffs.row(t).segment(0, dim) * basis_at_pts;
    out.row(1) = pr.coeffs.row(t).segment(dim, dim) * basis_at_pts;
    return out;
}

double l2_error_post(const Mesh& m, const PostprocessResult& pr,
                     const std::function<Eigen::Vector2d(Point2)>& exact) {
    const QuadratureRule q = quad_rule(std::min(2 * (pr.degree + 1) + 6, 20));
    const Eigen::MatrixXd tab = TriangleBasis(pr.degree).values(q);
    double acc = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        const Eigen::MatrixXd uv = post_values(pr, t, tab);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::Vector2d d =
                uv.col(p) - exact(map.apply({q.x(p), q.y(p)}));
            acc += map.det * q.weights[p] * d.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

}  // namespace elastodpg
