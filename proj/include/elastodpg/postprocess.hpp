#pragma once

#include <Eigen/Dense>
#include <functional>

#include "elastodpg/assembly.hpp"

namespace elastodpg {

/// L² projection of v onto the rigid body motions of element t. The returned
/// coefficients refer to the centroid-centered basis r1 = (1,0), r2 = (0,1),
/// r3 = (-(y-yc), x-xc), which makes the 3x3 normal equations diagonal.
Eigen::Vector3d rm_project(const Mesh& m, int t,
                           const std::function<Eigen::Vector2d(Point2)>& v);

/// Same projection from point values (2 x nq) of v at the points of q.
Eigen::Vector3d rm_project_values(const Mesh& m, int t, const QuadratureRule& q,
                                  const Eigen::MatrixXd& vals);

/// Element-local postprocessed displacement: per element the P^{k+1} field
/// with (eps(u~), eps(v)) = (A sigma_h, eps(v)) for all v orthogonal to the
/// rigid body motions, and Pi_rm u~ = Pi_rm u_h. The RM constraint is
/// enforced with three Lagrange multipliers.
struct PostprocessResult {
    int degree = 1;              // k + 1
    Eigen::MatrixXd coeffs;      // n_tri x 2*dim P^{k+1}; x modes then y modes
};

PostprocessResult postprocess(const Mesh& m, const SpaceLayout& lay,
                              const SolutionFields& sol, const LameParams& p,
                              int threads = 1);

/// Values of the postprocessed field on element t at reference points,
/// given the P^{k+1} basis table at those points; 2 x npts.
Eigen::MatrixXd post_values(const PostprocessResult& pr, int t,
                            const Eigen::MatrixXd& basis_at_pts);

/// L²(Ω) error of the postprocessed displacement.
double l2_error_post(const Mesh& m, const PostprocessResult& pr,
                     const std::function<Eigen::Vector2d(Point2)>& exact);

}  // namespace elastodpg
