#include "elastodpg/postprocess.hpp"

#include <cmath>

#include "doctest.h"

using namespace elastodpg;

namespace {

Mesh reference_triangle() {
    return Mesh::from_triangles({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
                                {Triangle{{0, 1, 2}}},
                                [](const Point2&, const Point2&) {
                                    return BoundaryLabel::Dirichlet;
                                });
}

Mesh skewed_triangle() {
    return Mesh::from_triangles({{0.3, -0.2}, {1.7, 0.4}, {0.2, 1.1}},
                                {Triangle{{0, 1, 2}}},
                                [](const Point2&, const Point2&) {
                                    return BoundaryLabel::Dirichlet;
                                });
}

// Coefficient vector with only sigma/u entries filled from L2 projections of
// the given fields; traces stay zero (postprocess never reads them).
Eigen::VectorXd project_fields(
    const Mesh& m, const SpaceLayout& lay,
    const std::function<Eigen::Matrix2d(Point2)>& sigma,
    const std::function<Eigen::Vector2d(Point2)>& u) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(lay.n_total);
    for (int c = 0; c < 4; ++c) {
        const int rr = c / 2, cc = c % 2;
        const Eigen::MatrixXd proj = l2_project(
            [&](Point2 q) { return sigma(q)(rr, cc); }, lay.k, m);
        for (int t = 0; t < m.num_triangles(); ++t)
            for (int mode = 0; mode < lay.dim_sigma_mode; ++mode)
                coeffs(lay.element_dofs[t][lay.col_sigma(c, mode)]) =
                    proj(t, mode);
    }
    for (int c = 0; c < 2; ++c) {
        const Eigen::MatrixXd proj = l2_project(
            [&, c](Point2 q) { return u(q)(c); }, lay.k + lay.j, m);
        for (int t = 0; t < m.num_triangles(); ++t)
            for (int mode = 0; mode < lay.dim_u_mode; ++mode)
                coeffs(lay.element_dofs[t][lay.col_u(c, mode)]) = proj(t, mode);
    }
    return coeffs;
}

double rm_field_norm(const Mesh& m, int t, const Eigen::Vector3d& a) {
    const QuadratureRule q = quad_rule(4);
    const AffineMap map = affine_map(m, t);
    const Point2 cen = m.centroid(t);
    double acc = 0.0;
    for (int p = 0; p < q.size(); ++p) {
        const Point2 x = map.apply({q.x(p), q.y(p)});
        const double vx = a(0) - a(2) * (x.y - cen.y);
        const double vy = a(1) + a(2) * (x.x - cen.x);
        acc += map.det * q.weights[p] * (vx * vx + vy * vy);
    }
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("rigid body motions are fixed points of rm_project") {
    for (const Mesh& m : {skewed_triangle(), unit_square_mesh(2)}) {
        for (int t = 0; t < m.num_triangles(); ++t) {
            const auto v = [](Point2 q) {
                return Eigen::Vector2d(2.0 - 3.0 * q.y, 1.0 + 3.0 * q.x);
            };
            const Eigen::Vector3d a = rm_project(m, t, v);
            const Point2 cen = m.centroid(t);
            CHECK(a(0) == doctest::Approx(2.0 - 3.0 * cen.y).epsilon(1e-12));
            CHECK(a(1) == doctest::Approx(1.0 + 3.0 * cen.x).epsilon(1e-12));
            CHECK(a(2) == doctest::Approx(3.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("rm_project of (x,0) on the reference triangle") {
    const Mesh m = reference_triangle();
    const Eigen::Vector3d a =
        rm_project(m, 0, [](Point2 q) { return Eigen::Vector2d(q.x, 0.0); });
    // normal equations with moments: integral x = 1/6, xy = 1/24, x^2 = 1/12
    CHECK(a(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(a(1) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(a(2) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("rm_project leaves an RM-orthogonal remainder") {
    const Mesh m = unit_square_mesh(3);
    const auto v = [](Point2 q) {
        return Eigen::Vector2d(std::sin(q.x + 2.0 * q.y), q.x * q.x - q.y);
    };
    const QuadratureRule q = quad_rule(12);
    for (int t : {0, 7, 11}) {
        const Eigen::Vector3d a = rm_project(m, t, v);
        const AffineMap map = affine_map(m, t);
        const Point2 cen = m.centroid(t);
        Eigen::Vector3d res = Eigen::Vector3d::Zero();
        for (int p = 0; p < q.size(); ++p) {
            const Point2 x = map.apply({q.x(p), q.y(p)});
            const Eigen::Vector2d vv = v(x);
            const double dx = vv(0) - (a(0) - a(2) * (x.y - cen.y));
            const double dy = vv(1) - (a(1) + a(2) * (x.x - cen.x));
            const double w = map.det * q.weights[p];
            res(0) += w * dx;
            res(1) += w * dy;
            res(2) += w * (-(x.y - cen.y) * dx + (x.x - cen.x) * dy);
        }
        CHECK(res.norm() <= 1e-12);
    }
}

TEST_CASE("rm approximation constant stays small under refinement") {
    // || v - Pi_rm v ||_T <= C h_T || eps(v) ||_T with a stable C
    const auto v = [](Point2 q) {
        return Eigen::Vector2d(std::sin(q.x + 2.0 * q.y), std::cos(q.x - q.y));
    };
    const auto eps = [](Point2 q) -> Eigen::Matrix2d {
        const double e11 = std::cos(q.x + 2.0 * q.y);
        const double e22 = std::sin(q.x - q.y);
        const double e12 =
            0.5 * (2.0 * std::cos(q.x + 2.0 * q.y) - std::sin(q.x - q.y));
        Eigen::Matrix2d e;
        e << e11, e12, e12, e22;
        return e;
    };
    const QuadratureRule q = quad_rule(12);
    double cmax = 0.0;
    for (int n : {2, 4, 8}) {
        const Mesh m = unit_square_mesh(n);
        for (int t = 0; t < m.num_triangles(); ++t) {
            const Eigen::Vector3d a = rm_project(m, t, v);
            const AffineMap map = affine_map(m, t);
            const Point2 cen = m.centroid(t);
            double err2 = 0.0, eps2 = 0.0;
            for (int p = 0; p < q.size(); ++p) {
                const Point2 x = map.apply({q.x(p), q.y(p)});
                const Eigen::Vector2d vv = v(x);
                const double dx = vv(0) - (a(0) - a(2) * (x.y - cen.y));
                const double dy = vv(1) - (a(1) + a(2) * (x.x - cen.x));
                const double w = map.det * q.weights[p];
                err2 += w * (dx * dx + dy * dy);
                eps2 += w * eps(x).squaredNorm();
            }
            cmax = std::max(cmax,
                            std::sqrt(err2) / (m.diameter(t) * std::sqrt(eps2)));
        }
    }
    CHECK(cmax <= 10.0);
}

TEST_CASE("postprocess returns the rigid input when sigma vanishes") {
    Mesh m = unit_square_mesh(2);
    m = bisect(m, {1, 4});
    const SpaceLayout lay = build_layout(m, 0, 1);
    const auto rigid = [](Point2 q) {
        return Eigen::Vector2d(2.0 - 3.0 * q.y, 1.0 + 3.0 * q.x);
    };
    SolutionFields sol;
    sol.coeffs = project_fields(
        m, lay, [](Point2) { return Eigen::Matrix2d::Zero().eval(); }, rigid);
    const PostprocessResult pr = postprocess(m, lay, sol, LameParams{1.0, 1.0});

    const QuadratureRule q = quad_rule(6);
    const Eigen::MatrixXd tab = TriangleBasis(pr.degree).values(q);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        const Eigen::MatrixXd uv = post_values(pr, t, tab);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::Vector2d ex = rigid(map.apply({q.x(p), q.y(p)}));
            CHECK((uv.col(p) - ex).norm() <= 1e-10);
        }
    }
}

TEST_CASE("postprocess reproduces a global P^{k+1} displacement") {
    const LameParams lame{1.0, 1.0};
    const auto ustar = [](Point2 q) {
        return Eigen::Vector2d(q.x * q.x + 2.0 * q.x * q.y,
                               q.y * q.y - q.x * q.y);
    };
    const auto sigstar = [&](Point2 q) -> Eigen::Matrix2d {
        Eigen::Matrix2d e;
        const double e12 = 0.5 * (2.0 * q.x - q.y);
        e << 2.0 * q.x + 2.0 * q.y, e12, e12, 2.0 * q.y - q.x;
        return stiffness_apply(e, LameParams{1.0, 1.0});
    };
    Mesh m = unit_square_mesh(2);
    m = bisect(m, {0, 3});
    const SpaceLayout lay = build_layout(m, 1, 0);
    SolutionFields sol;
    sol.coeffs = project_fields(m, lay, sigstar, ustar);
    const PostprocessResult pr = postprocess(m, lay, sol, lame);
    CHECK(l2_error_post(m, pr, ustar) <= 1e-10);
}

TEST_CASE("postprocessed field keeps the RM moments of u_h") {
    const Problem prob = problem_smooth_square(LameParams{1.0, 1.0});
    const Mesh m = unit_square_mesh(3);
    SpaceLayout lay = build_layout(m, 1, 0);
    apply_dirichlet(m, prob.dirichlet_data, lay);
    const SolutionFields sol = solve_dpg(m, lay, prob);
    const PostprocessResult pr = postprocess(m, lay, sol, prob.lame);

    const QuadratureRule q = quad_rule(12);
    const Eigen::MatrixXd tab_post = TriangleBasis(pr.degree).values(q);
    const Eigen::MatrixXd tab_u = TriangleBasis(lay.k + lay.j).values(q);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const Eigen::MatrixXd diff =
            post_values(pr, t, tab_post) - u_values(lay, sol.coeffs, t, tab_u);
        const Eigen::Vector3d a = rm_project_values(m, t, q, diff);
        CHECK(rm_field_norm(m, t, a) <= 1e-10);
    }
}

TEST_CASE("postprocess survives a thin element") {
    const Mesh m = Mesh::from_triangles(
        {{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.02}}, {Triangle{{0, 1, 2}}},
        [](const Point2&, const Point2&) { return BoundaryLabel::Dirichlet; });
    const SpaceLayout lay = build_layout(m, 1, 0);
    const auto rigid = [](Point2 q) {
        return Eigen::Vector2d(0.5 + q.y, 1.5 - q.x);
    };
    SolutionFields sol;
    sol.coeffs = project_fields(
        m, lay, [](Point2) { return Eigen::Matrix2d::Zero().eval(); }, rigid);
    const PostprocessResult pr = postprocess(m, lay, sol, LameParams{1.0, 1.0});
    CHECK(l2_error_post(m, pr, rigid) <= 1e-9);
}

TEST_CASE("postprocessing gains an order on the smooth square") {
    const Problem prob = problem_smooth_square(LameParams{1.0, 1.0});

    auto study = [&](int k) {
        double prev_post = 0.0, prev_u = 0.0, ep = 0.0, eu = 0.0;
        for (int n : {2, 4, 8}) {
            const Mesh m = unit_square_mesh(n);
            SpaceLayout lay = build_layout(m, k, 0);
            apply_dirichlet(m, prob.dirichlet_data, lay);
            const SolutionFields sol = solve_dpg(m, lay, prob);
            const PostprocessResult pr = postprocess(m, lay, sol, prob.lame);
            prev_post = ep;
            prev_u = eu;
            ep = l2_error_post(m, pr, prob.exact_u);
            eu = l2_error_u(m, lay, sol.coeffs, prob.exact_u);
        }
        return std::array<double, 3>{std::log2(prev_post / ep), ep, eu};
    };

    const auto [eoc1, post1, u1] = study(1);
    CHECK(eoc1 >= 2.5);
    CHECK(eoc1 <= 3.5);
    CHECK(post1 < u1);  // one extra order shows up already at n=8

    const auto [eoc0, post0, u0] = study(0);
    MESSAGE("k=0 postprocessing EOC (theorem needs k>=1): ", eoc0);
    WARN(eoc0 >= 1.6);
}

TEST_CASE("l2_error_u matches the hand value for the zero field") {
    const Problem prob = problem_smooth_square(LameParams{1.0, 1.0});
    const Mesh m = unit_square_mesh(2);
    const SpaceLayout lay = build_layout(m, 0, 0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(lay.n_total);
    // ||u||^2 = 2 * (1/2)^2 integral of sin^2 pi x sin^2 pi y = 2/4
    CHECK(l2_error_u(m, lay, zero, prob.exact_u) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
}
