#pragma once

#include <Eigen/Dense>

namespace elastodpg {

struct LameParams {
    double lambda = 1.0;
    double mu = 1.0;
};

/// lambda = E nu / ((1-2nu)(1+nu)), mu = E / (2(1+nu)); requires nu < 1/2.
LameParams lame_from_E_nu(double E, double nu);

/// Compliance A tau = tau/(2mu) - lambda tr(tau) I / (2mu(2mu+2lambda)),
/// extended to asymmetric arguments as A(sym tau) + as(tau).
Eigen::Matrix2d compliance_apply(const Eigen::Matrix2d& tau, const LameParams& p);

/// Stiffness C eps = 2 mu eps + lambda tr(eps) I; inverse of the compliance
/// on symmetric matrices. The input is symmetrized defensively.
Eigen::Matrix2d stiffness_apply(const Eigen::Matrix2d& eps, const LameParams& p);

}  // namespace elastodpg
