#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <vector>

#include "elastodpg/layout.hpp"
#include "elastodpg/material.hpp"
#include "elastodpg/problem.hpp"

namespace elastodpg {

struct SolveOptions {
    enum class Solver { cholesky, cg };
    Solver solver = Solver::cholesky;
    double tol = 1e-10;   // iterative-solver relative tolerance
    int threads = 1;      // 0 = all hardware threads
};

/// Reference-element tables shared by every element of a (k, j) run.
struct ReferenceTables {
    int k = 0, j = 0;
    int dim_k = 0, dim_kj = 0, dim_test = 0;
    int n_test = 0;   // 5*dim_test + dim_k
    QuadratureRule q_mat;    // Gram and B integrands (polynomial, exact)
    QuadratureRule q_load;   // loads and error norms (elevated degree)
    Eigen::MatrixXd test_v, test_dx, test_dy;  // P^{k+2} at q_mat
    Eigen::MatrixXd test_v_load;               // P^{k+2} at q_load
    Eigen::MatrixXd trial_k;                   // P^k at q_mat
    Eigen::MatrixXd trial_kj;                  // P^{k+j} at q_mat
    GaussRule1D edge_q;
    // Test traces on local edge e; index 1 holds the reversed traversal
    // (used when the global edge parameter runs against the local one).
    std::array<std::array<Eigen::MatrixXd, 2>, 3> test_trace;
    Eigen::MatrixXd flux_1d;  // orthonormal Legendre at edge_q points
    Eigen::MatrixXd uhat_1d;  // Lagrange (Lobatto nodes) at edge_q points
    std::array<Eigen::Matrix2d, 4> Ec;  // sigma components, row-major
    std::array<Eigen::Matrix2d, 3> Sc;  // orthonormal symmetric components
    Eigen::Matrix2d Jhat;               // orthonormal antisymmetric component

    int row_tau(int comp, int mode) const { return comp * dim_test + mode; }
    int row_v(int comp, int mode) const { return (3 + comp) * dim_test + mode; }
    int row_q(int mode) const { return 5 * dim_test + mode; }
};

ReferenceTables make_reference_tables(int k, int j);

/// Local test-space Gram matrix of the V-inner product
/// (grad v, grad w) + (v, w) + (div tau, div sigma) + (tau, sigma) + (q, r).
Eigen::MatrixXd element_gram(const Mesh& m, int t, const ReferenceTables& rt);

/// Local DPG bilinear-form matrix; columns follow the layout column order.
Eigen::MatrixXd element_b(const Mesh& m, const SpaceLayout& lay, int t,
                          const ReferenceTables& rt, const LameParams& p);

/// Local load vector (f, v); only the v-block rows are nonzero.
Eigen::VectorXd element_load(const Mesh& m, int t, const ReferenceTables& rt,
                             const std::function<Eigen::Vector2d(Point2)>& f);

struct ElementSystem {
    Eigen::MatrixXd B;
    Eigen::MatrixXd G;
    Eigen::VectorXd l;
    Eigen::LLT<Eigen::MatrixXd> gram_llt;
};

ElementSystem element_system(const Mesh& m, const SpaceLayout& lay, int t,
                             const ReferenceTables& rt, const Problem& prob);

struct CondensedElement {
    Eigen::MatrixXd S;  // B^T G^{-1} B
    Eigen::VectorXd f;  // B^T G^{-1} l
};

CondensedElement condense(const ElementSystem& es);

struct GlobalSystem {
    Eigen::SparseMatrix<double> S;
    Eigen::VectorXd rhs;
    // The assembled system is posed in sigma / stress_scale (= 2 mu)
    // variables so that stress and displacement dofs stay comparable for
    // stiff materials; solve() maps back.
    double stress_scale = 1.0;
};

GlobalSystem assemble(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                      const SolveOptions& opts = {});

struct SolutionFields {
    Eigen::VectorXd coeffs;  // all trial dofs, prescribed slots included
    std::vector<Eigen::VectorXd> residual;  // eps_e per element (estimator)
    Eigen::VectorXd eta_T;
    double eta = 0.0;
};

/// Sparse SPD solve of the condensed normal equations; expands the free
/// solution back over the prescribed dofs.
SolutionFields solve(const GlobalSystem& gs, const SpaceLayout& lay,
                     const SolveOptions& opts = {});

/// Per-element residual lift eps_e = G^{-1}(l - B u_e) and its V-norm
/// eta_T; fills sol.residual / sol.eta_T / sol.eta.
void residual_estimate(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                       SolutionFields& sol, const SolveOptions& opts = {});

/// assemble + solve + residual_estimate.
SolutionFields solve_dpg(const Mesh& m, const SpaceLayout& lay, const Problem& prob,
                         const SolveOptions& opts = {});

/// Values of u_h on element t at reference points; 2 x npts.
Eigen::MatrixXd u_values(const SpaceLayout& lay, const Eigen::VectorXd& coeffs,
                         int t, const Eigen::MatrixXd& trial_u_at_pts);

/// Values of sigma_h on element t at reference points; rows are the
/// row-major matrix entries (00,01,10,11); 4 x npts.
Eigen::MatrixXd sigma_values(const SpaceLayout& lay, const Eigen::VectorXd& coeffs,
                             int t, const Eigen::MatrixXd& trial_k_at_pts);

/// L²(Ω) error of the displacement field against a smooth reference,
/// integrated with the elevated (load-accuracy) rule.
double l2_error_u(const Mesh& m, const SpaceLayout& lay,
                  const Eigen::VectorXd& coeffs,
                  const std::function<Eigen::Vector2d(Point2)>& exact);

/// L²(Ω) error of the stress field (Frobenius norm pointwise).
double l2_error_sigma(const Mesh& m, const SpaceLayout& lay,
                      const Eigen::VectorXd& coeffs,
                      const std::function<Eigen::Matrix2d(Point2)>& exact);

/// Runs fn over [0,n) split into contiguous chunks, one per worker; with
/// threads == 1 runs inline. Chunk boundaries are independent of the thread
/// count, so any per-chunk output can be merged deterministically.
void parallel_for_chunks(int n, int threads,
                         const std::function<void(int, int, int)>& fn);

}  // namespace elastodpg
