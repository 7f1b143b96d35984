#include "elastodpg/material.hpp"

#include <stdexcept>

namespace elastodpg {

LameParams lame_from_E_nu(double E, double nu) {
    if (E <= 0.0) throw std::invalid_argument("lame_from_E_nu: need E > 0");
    if (nu < 0.0 || nu >= 0.5)
        throw std::invalid_argument("lame_from_E_nu: need 0 <= nu < 1/2");
    return {E * nu / ((1.0 - 2.0 * nu) * (1.0 + nu)), E / (2.0 * (1.0 + nu))};
}

Eigen::Matrix2d compliance_apply(const Eigen::Matrix2d& tau, const LameParams& p) {
    const Eigen::Matrix2d sym = 0.5 * (tau + tau.transpose());
    const Eigen::Matrix2d as = tau - sym;
    // Written with the lambda in the denominator so lambda -> infinity is benign.
    const double trace_coeff =
        p.lambda / (2.0 * p.mu * (2.0 * p.mu + 2.0 * p.lambda));
    return sym / (2.0 * p.mu) -
           trace_coeff * sym.trace() * Eigen::Matrix2d::Identity() + as;
}

Eigen::Matrix2d stiffness_apply(const Eigen::Matrix2d& eps, const LameParams& p) {
    const Eigen::Matrix2d sym = 0.5 * (eps + eps.transpose());
    return 2.0 * p.mu * sym + p.lambda * sym.trace() * Eigen::Matrix2d::Identity();
}

}  // namespace elastodpg
