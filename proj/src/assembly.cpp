#include "elastodpg/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace elastodpg {

namespace {

constexpr int kMaxQuadDegree = 20;

Eigen::VectorXd scaled_weights(const std::vector<double>& w, double scale) {
    Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    out *= scale;
    return out;
}

// Physical-coordinate derivatives of a reference table: grad_x = J^{-T} grad_r.
void physical_gradients(const AffineMap& map, const Eigen::MatrixXd& dr,
                        const Eigen::MatrixXd& ds, Eigen::MatrixXd& dx,
                        Eigen::MatrixXd& dy) {
    const Eigen::Matrix2d jit = map.Jinv.transpose();
    dx = jit(0, 0) * dr + jit(0, 1) * ds;
    dy = jit(1, 0) * dr + jit(1, 1) * ds;
}

int resolve_workers(int threads, int n) {
    int t = threads;
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return std::min(t, std::max(1, n));
}

}  // namespace

void parallel_for_chunks(int n, int threads,
                         const std::function<void(int, int, int)>& fn) {
    const int nw = resolve_workers(threads, n);
    if (nw == 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::exception_ptr> errors(nw);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        const int lo = static_cast<int>(static_cast<long long>(n) * w / nw);
        const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / nw);
        pool.emplace_back([&, lo, hi, w] {
            try {
                fn(lo, hi, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

ReferenceTables make_reference_tables(int k, int j) {
    if (k < 0 || j < 0 || j > 1)
        throw std::invalid_argument("make_reference_tables: need k >= 0 and j in {0,1}");
    ReferenceTables rt;
    rt.k = k;
    rt.j = j;
    rt.dim_k = triangle_space_dim(k);
    rt.dim_kj = triangle_space_dim(k + j);
    rt.dim_test = triangle_space_dim(k + 2);
    rt.n_test = 5 * rt.dim_test + rt.dim_k;
    rt.q_mat = quad_rule(std::min(2 * (k + 2) + 2, kMaxQuadDegree));
    rt.q_load = quad_rule(std::min(2 * (k + 2) + 6, kMaxQuadDegree));

    const TriangleBasis test(k + 2), trial_k(k), trial_kj(k + j);
    rt.test_v = test.values(rt.q_mat);
    test.gradients(rt.q_mat, rt.test_dx, rt.test_dy);
    rt.test_v_load = test.values(rt.q_load);
    rt.trial_k = trial_k.values(rt.q_mat);
    rt.trial_kj = trial_kj.values(rt.q_mat);

    rt.edge_q = gauss_rule_1d(k + 3);
    const std::array<Point2, 3> rv{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    for (int e = 0; e < 3; ++e) {
        const Point2 pa = rv[(e + 1) % 3], pb = rv[(e + 2) % 3];
        for (int dir = 0; dir < 2; ++dir) {
            std::vector<Point2> pts;
            pts.reserve(rt.edge_q.points.size());
            for (double t : rt.edge_q.points) {
                const double s = dir == 0 ? t : 1.0 - t;
                pts.push_back({pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y)});
            }
            rt.test_trace[e][dir] = test.values(pts);
        }
    }
    rt.flux_1d = legendre_values_1d(k, rt.edge_q.points);
    rt.uhat_1d = lagrange_values_1d(lobatto_nodes_1d(k + 2), rt.edge_q.points);

    const double s2 = std::sqrt(0.5);
    for (auto& e : rt.Ec) e.setZero();
    rt.Ec[0](0, 0) = 1.0;
    rt.Ec[1](0, 1) = 1.0;
    rt.Ec[2](1, 0) = 1.0;
    rt.Ec[3](1, 1) = 1.0;
    for (auto& s : rt.Sc) s.setZero();
    rt.Sc[0](0, 0) = 1.0;
    rt.Sc[1](1, 1) = 1.0;
    rt.Sc[2](0, 1) = rt.Sc[2](1, 0) = s2;
    rt.Jhat << 0.0, s2, -s2, 0.0;
    return rt;
}

Eigen::MatrixXd element_gram(const Mesh& m, int t, const ReferenceTables& rt) {
    const AffineMap map = affine_map(m, t);
    const Eigen::VectorXd w = scaled_weights(rt.q_mat.weights, map.det);
    Eigen::MatrixXd dx, dy;
    physical_gradients(map, rt.test_dx, rt.test_dy, dx, dy);

    const Eigen::MatrixXd mass = rt.test_v * w.asDiagonal() * rt.test_v.transpose();
    const Eigen::MatrixXd kxx = dx * w.asDiagonal() * dx.transpose();
    const Eigen::MatrixXd kxy = dx * w.asDiagonal() * dy.transpose();
    const Eigen::MatrixXd kyy = dy * w.asDiagonal() * dy.transpose();

    const int dt = rt.dim_test;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(rt.n_test, rt.n_test);
    for (int ca = 0; ca < 3; ++ca)
        for (int cb = 0; cb < 3; ++cb) {
            const Eigen::Matrix2d P = rt.Sc[ca].transpose() * rt.Sc[cb];
            Eigen::MatrixXd blk = P(0, 0) * kxx + P(1, 1) * kyy;
            if (P(0, 1) != 0.0) blk += P(0, 1) * kxy;
            if (P(1, 0) != 0.0) blk += P(1, 0) * kxy.transpose();
            if (ca == cb) blk += mass;
            G.block(ca * dt, cb * dt, dt, dt) = blk;
        }
    const Eigen::MatrixXd h1 = mass + kxx + kyy;
    G.block(3 * dt, 3 * dt, dt, dt) = h1;
    G.block(4 * dt, 4 * dt, dt, dt) = h1;
    G.block(5 * dt, 5 * dt, rt.dim_k, rt.dim_k) =
        rt.trial_k * w.asDiagonal() * rt.trial_k.transpose();
    return G;
}

Eigen::MatrixXd element_b(const Mesh& m, const SpaceLayout& lay, int t,
                          const ReferenceTables& rt, const LameParams& p) {
    const AffineMap map = affine_map(m, t);
    const Eigen::VectorXd w = scaled_weights(rt.q_mat.weights, map.det);
    Eigen::MatrixXd dx, dy;
    physical_gradients(map, rt.test_dx, rt.test_dy, dx, dy);

    const Eigen::MatrixXd mtk = rt.test_v * w.asDiagonal() * rt.trial_k.transpose();
    const Eigen::MatrixXd dxk = dx * w.asDiagonal() * rt.trial_k.transpose();
    const Eigen::MatrixXd dyk = dy * w.asDiagonal() * rt.trial_k.transpose();
    const Eigen::MatrixXd dxkj = dx * w.asDiagonal() * rt.trial_kj.transpose();
    const Eigen::MatrixXd dykj = dy * w.asDiagonal() * rt.trial_kj.transpose();
    const Eigen::MatrixXd mq = rt.trial_k * w.asDiagonal() * rt.trial_k.transpose();

    const int dt = rt.dim_test;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rt.n_test, lay.columns_per_element());

    // (A sigma, tau) and (sigma, q)
    for (int c = 0; c < 4; ++c) {
        const Eigen::Matrix2d ac = compliance_apply(rt.Ec[c], p);
        for (int d = 0; d < 3; ++d) {
            const double acs = ac.cwiseProduct(rt.Sc[d]).sum();
            if (acs != 0.0)
                B.block(rt.row_tau(d, 0), lay.col_sigma(c, 0), dt, rt.dim_k) += acs * mtk;
        }
        const double cj = rt.Ec[c].cwiseProduct(rt.Jhat).sum();
        if (cj != 0.0)
            B.block(rt.row_q(0), lay.col_sigma(c, 0), rt.dim_k, rt.dim_k) += cj * mq;
    }

    // (u, div tau)
    for (int d = 0; d < 3; ++d)
        for (int c = 0; c < 2; ++c) {
            const double s0 = rt.Sc[d](c, 0), s1 = rt.Sc[d](c, 1);
            if (s0 != 0.0)
                B.block(rt.row_tau(d, 0), lay.col_u(c, 0), dt, rt.dim_kj) += s0 * dxkj;
            if (s1 != 0.0)
                B.block(rt.row_tau(d, 0), lay.col_u(c, 0), dt, rt.dim_kj) += s1 * dykj;
        }

    // (sigma, grad v); the gradient is not symmetrized
    for (int c = 0; c < 4; ++c) {
        const int row_comp = c / 2, col_comp = c % 2;
        B.block(rt.row_v(row_comp, 0), lay.col_sigma(c, 0), dt, rt.dim_k) +=
            (col_comp == 0 ? dxk : dyk);
    }

    // skeleton terms
    const auto& tri = m.triangles()[t];
    const Eigen::VectorXd we = scaled_weights(rt.edge_q.weights, 1.0);
    for (int e = 0; e < 3; ++e) {
        const int a = (e + 1) % 3, b = (e + 2) % 3;
        const int va = tri.v[a], vb = tri.v[b];
        const Point2 pa = m.vertices()[va], pb = m.vertices()[vb];
        const Point2 tv = pb - pa;
        const double len = norm(tv);
        const Eigen::Vector2d nu(tv.y / len, -tv.x / len);  // outward for CCW
        const int dir = va < vb ? 0 : 1;
        const Eigen::MatrixXd trw =
            rt.test_trace[e][dir] * (len * we).asDiagonal();

        // -<uhat, tau nu>
        const Eigen::MatrixXd tu = trw * rt.uhat_1d.transpose();
        const int lower_local = va < vb ? a : b;
        const int upper_local = va < vb ? b : a;
        for (int d = 0; d < 3; ++d) {
            const Eigen::Vector2d sn = rt.Sc[d] * nu;
            for (int c = 0; c < 2; ++c) {
                if (sn(c) == 0.0) continue;
                for (int node = 0; node <= rt.k + 1; ++node) {
                    const int col = node == 0 ? lay.col_uhat_vertex(lower_local, c)
                                  : node == rt.k + 1
                                        ? lay.col_uhat_vertex(upper_local, c)
                                        : lay.col_uhat_edge(e, node, c);
                    B.block(rt.row_tau(d, 0), col, dt, 1) -= sn(c) * tu.col(node);
                }
            }
        }

        // -<sigma_n, v>; stored flux rides on the global edge normal
        const double sgn = lay.flux_sign[t][e];
        const Eigen::MatrixXd tf = trw * rt.flux_1d.transpose();
        for (int c = 0; c < 2; ++c)
            B.block(rt.row_v(c, 0), lay.col_flux(e, c, 0), dt, rt.k + 1) -= sgn * tf;
    }
    return B;
}

Eigen::VectorXd element_load(const Mesh& m, int t, const ReferenceTables& rt,
                             const std::function<Eigen::Vector2d(Point2)>& f) {
    Eigen::VectorXd l = Eigen::VectorXd::Zero(rt.n_test);
    if (!f) return l;
    const AffineMap map = affine_map(m, t);
    const Eigen::VectorXd w = scaled_weights(rt.q_load.weights, map.det);
    const int nq = rt.q_load.size();
    Eigen::MatrixXd fv(2, nq);
    for (int p = 0; p < nq; ++p)
        fv.col(p) = f(map.apply({rt.q_load.x(p), rt.q_load.y(p)}));
    const int dt = rt.dim_test;
    for (int c = 0; c < 2; ++c)
        l.segment(rt.row_v(c, 0), dt) =
            rt.test_v_load * w.cwiseProduct(fv.row(c).transpose());
    return l;
}

ElementSystem element_system(const Mesh& m, const SpaceLayout& lay, int t,
                             const ReferenceTables& rt, const Problem& prob) {
    ElementSystem es;
    es.G = element_gram(m, t, rt);
    es.B = element_b(m, lay, t, rt, prob.lame);
    es.l = element_load(m, t, rt, prob.f);
    es.gram_llt.compute(es.G);
    if (es.gram_llt.info() != Eigen::Success)
        throw std::runtime_error("element_system: Gram matrix not SPD");
    return es;
}

CondensedElement condense(const ElementSystem& es) {
    const Eigen::MatrixXd gib = es.gram_llt.solve(es.B);
    CondensedElement ce;
    ce.S = es.B.transpose() * gib;
    ce.f = gib.transpose() * es.l;
    return ce;
}

namespace {

// Rewrites the element system in solver units: sigma' = sigma / s and
// momentum/symmetry test rows divided by s, with s = 2 mu. This is the
// residual minimization for the nondimensionalized data (material and load
// divided by s), which keeps the minimization meaningful independently of
// the unit system: posed on the raw data the least squares is dominated by
// the momentum rows (scale E) and the displacement approximation degrades
// for E >> 1. For O(1) materials it is a bounded reweighting.
void scale_element_system(ElementSystem& es, const SpaceLayout& lay,
                          const ReferenceTables& rt, double s) {
    const double w = 1.0 / s;
    const int nvq = rt.n_test - 3 * rt.dim_test;
    es.B.bottomRows(nvq) *= w;
    es.l.tail(nvq) *= w;
    es.B.leftCols(4 * lay.dim_sigma_mode) *= s;
    es.B.middleCols(4 * lay.dim_sigma_mode + 2 * lay.dim_u_mode,
                    6 * (lay.k + 1)) *= s;
}

bool is_stress_dof(const SpaceLayout& lay, int g) {
    return g < lay.u_offset ||
           (g >= lay.flux_offset && g < lay.uhat_offset);
}

}  // namespace

GlobalSystem assemble(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                      const SolveOptions& opts) {
    const ReferenceTables rt = make_reference_tables(lay.k, lay.j);
    const int nt = m.num_triangles();
    const int nw = resolve_workers(opts.threads, nt);
    const double s = prob.lame.mu > 0.0 ? 2.0 * prob.lame.mu : 1.0;

    // Per-worker streams, merged in worker order. The chunks are contiguous
    // and ascending, so the merged streams match the serial element order and
    // the assembled system is bitwise independent of the worker count.
    struct Buffer {
        std::vector<Eigen::Triplet<double>> trip;
        std::vector<std::pair<int, double>> rhs;
    };
    std::vector<Buffer> bufs(nw);

    parallel_for_chunks(nt, opts.threads, [&](int lo, int hi, int worker) {
        Buffer& buf = bufs[worker];
        const int nl = lay.columns_per_element();
        buf.trip.reserve(static_cast<size_t>(hi - lo) * nl * nl);
        for (int t = lo; t < hi; ++t) {
            ElementSystem es = element_system(m, lay, t, rt, prob);
            scale_element_system(es, lay, rt, s);
            const CondensedElement ce = condense(es);
            const auto& dofs = lay.element_dofs[t];
            for (int i = 0; i < nl; ++i) {
                const int gi = lay.system_index[dofs[i]];
                if (gi < 0) continue;
                double r = ce.f(i);
                for (int jj = 0; jj < nl; ++jj) {
                    const int gj = lay.system_index[dofs[jj]];
                    if (gj >= 0) {
                        buf.trip.emplace_back(gi, gj, ce.S(i, jj));
                    } else {
                        // prescribed values in scaled variables
                        const double pv = lay.prescribed_value[dofs[jj]];
                        r -= ce.S(i, jj) *
                             (is_stress_dof(lay, dofs[jj]) ? pv / s : pv);
                    }
                }
                buf.rhs.emplace_back(gi, r);
            }
        }
    });

    GlobalSystem gs;
    gs.stress_scale = s;
    gs.rhs = Eigen::VectorXd::Zero(lay.n_free);
    size_t total = 0;
    for (const auto& b : bufs) total += b.trip.size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(total);
    for (const auto& b : bufs) {
        trip.insert(trip.end(), b.trip.begin(), b.trip.end());
        for (const auto& [gi, r] : b.rhs) gs.rhs(gi) += r;
    }
    gs.S.resize(lay.n_free, lay.n_free);
    gs.S.setFromTriplets(trip.begin(), trip.end());
    return gs;
}

SolutionFields solve(const GlobalSystem& gs, const SpaceLayout& lay,
                     const SolveOptions& opts) {
    // Symmetric diagonal equilibration squashes the h-induced scale spread
    // between dof classes before factorizing.
    Eigen::VectorXd scale = gs.S.diagonal();
    for (int i = 0; i < scale.size(); ++i)
        scale(i) = scale(i) > 0.0 ? 1.0 / std::sqrt(scale(i)) : 1.0;
    const Eigen::SparseMatrix<double> A =
        scale.asDiagonal() * gs.S * scale.asDiagonal();
    const Eigen::VectorXd b = scale.cwiseProduct(gs.rhs);

    Eigen::VectorXd x;
    if (opts.solver == SolveOptions::Solver::cholesky) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("solve: sparse Cholesky factorization failed");
        x = ldlt.solve(b);
        // Iterative refinement recovers the digits the factorization loses
        // on badly conditioned (large-lambda) systems.
        const double bnorm = b.norm();
        for (int sweep = 0; sweep < 3; ++sweep) {
            const Eigen::VectorXd r = b - A * x;
            if (r.norm() <= opts.tol * bnorm) break;
            x += ldlt.solve(r);
        }
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                 Eigen::Lower | Eigen::Upper>
            cg;
        cg.setTolerance(opts.tol);
        cg.compute(A);
        x = cg.solve(b);
        if (cg.info() != Eigen::Success)
            throw std::runtime_error("solve: CG did not converge");
    }
    x = scale.cwiseProduct(x);
    SolutionFields sol;
    sol.coeffs.resize(lay.n_total);
    for (int g = 0; g < lay.n_total; ++g) {
        const int si = lay.system_index[g];
        if (si < 0) {
            sol.coeffs(g) = lay.prescribed_value[g];
        } else {
            // the system solves for sigma / stress_scale
            sol.coeffs(g) =
                is_stress_dof(lay, g) ? gs.stress_scale * x(si) : x(si);
        }
    }
    return sol;
}

void residual_estimate(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                       SolutionFields& sol, const SolveOptions& opts) {
    const ReferenceTables rt = make_reference_tables(lay.k, lay.j);
    const int nt = m.num_triangles();
    const double s = prob.lame.mu > 0.0 ? 2.0 * prob.lame.mu : 1.0;
    const int nvq = rt.n_test - 3 * rt.dim_test;
    sol.residual.assign(nt, Eigen::VectorXd());
    sol.eta_T.resize(nt);
    parallel_for_chunks(nt, opts.threads, [&](int lo, int hi, int) {
        const int nl = lay.columns_per_element();
        Eigen::VectorXd ue(nl);
        for (int t = lo; t < hi; ++t) {
            const ElementSystem es = element_system(m, lay, t, rt, prob);
            const auto& dofs = lay.element_dofs[t];
            for (int i = 0; i < nl; ++i) ue(i) = sol.coeffs(dofs[i]);
            // residual of the solver-unit (nondimensionalized) least squares
            Eigen::VectorXd r = es.l - es.B * ue;
            r.tail(nvq) /= s;
            sol.residual[t] = es.gram_llt.solve(r);
            sol.eta_T(t) = std::sqrt(std::max(0.0, sol.residual[t].dot(r)));
        }
    });
    sol.eta = std::sqrt(sol.eta_T.squaredNorm());
}

SolutionFields solve_dpg(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                         const SolveOptions& opts) {
    const GlobalSystem gs = assemble(m, lay, prob, opts);
    SolutionFields sol = solve(gs, lay, opts);
    residual_estimate(m, lay, prob, sol, opts);
    return sol;
}

double l2_error_u(const Mesh& m, const SpaceLayout& lay,
                  const Eigen::VectorXd& coeffs,
                  const std::function<Eigen::Vector2d(Point2)>& exact) {
    const QuadratureRule q = quad_rule(std::min(2 * (lay.k + 2) + 6, kMaxQuadDegree));
    const Eigen::MatrixXd tab = TriangleBasis(lay.k + lay.j).values(q);
    double acc = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        const Eigen::MatrixXd uh = u_values(lay, coeffs, t, tab);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::Vector2d d = uh.col(p) - exact(map.apply({q.x(p), q.y(p)}));
            acc += map.det * q.weights[p] * d.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

double l2_error_sigma(const Mesh& m, const SpaceLayout& lay,
                      const Eigen::VectorXd& coeffs,
                      const std::function<Eigen::Matrix2d(Point2)>& exact) {
    const QuadratureRule q = quad_rule(std::min(2 * (lay.k + 2) + 6, kMaxQuadDegree));
    const Eigen::MatrixXd tab = TriangleBasis(lay.k).values(q);
    double acc = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        const Eigen::MatrixXd sh = sigma_values(lay, coeffs, t, tab);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::Matrix2d s = exact(map.apply({q.x(p), q.y(p)}));
            Eigen::Matrix2d d;
            d << sh(0, p) - s(0, 0), sh(1, p) - s(0, 1),
                 sh(2, p) - s(1, 0), sh(3, p) - s(1, 1);
            acc += map.det * q.weights[p] * d.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

Eigen::MatrixXd u_values(const SpaceLayout& lay, const Eigen::VectorXd& coeffs,
                         int t, const Eigen::MatrixXd& trial_u_at_pts) {
    const auto& dofs = lay.element_dofs[t];
    Eigen::MatrixXd out(2, trial_u_at_pts.cols());
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd cc(lay.dim_u_mode);
        for (int mode = 0; mode < lay.dim_u_mode; ++mode)
            cc(mode) = coeffs(dofs[lay.col_u(c, mode)]);
        out.row(c) = cc.transpose() * trial_u_at_pts;
    }
    return out;
}

Eigen::MatrixXd sigma_values(const SpaceLayout& lay, const Eigen::VectorXd& coeffs,
                             int t, const Eigen::MatrixXd& trial_k_at_pts) {
    const auto& dofs = lay.element_dofs[t];
    Eigen::MatrixXd out(4, trial_k_at_pts.cols());
    for (int c = 0; c < 4; ++c) {
        Eigen::VectorXd cc(lay.dim_sigma_mode);
        for (int mode = 0; mode < lay.dim_sigma_mode; ++mode)
            cc(mode) = coeffs(dofs[lay.col_sigma(c, mode)]);
        out.row(c) = cc.transpose() * trial_k_at_pts;
    }
    return out;
}

}  // namespace elastodpg
