#include "elastodpg/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace elastodpg {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Problem problem_smooth_square(const LameParams& p) {
    Problem prob;
    prob.name = "smooth-square";
    prob.initial_mesh = [] { return unit_square_mesh(1); };
    prob.lame = p;
    prob.exact_u = [](Point2 q) {
        const double s = std::sin(kPi * q.x) * std::sin(kPi * q.y);
        return Eigen::Vector2d(s, s);
    };
    prob.exact_sigma = [p](Point2 q) {
        const double sx = std::sin(kPi * q.x), cx = std::cos(kPi * q.x);
        const double sy = std::sin(kPi * q.y), cy = std::cos(kPi * q.y);
        Eigen::Matrix2d eps;
        eps(0, 0) = kPi * cx * sy;
        eps(1, 1) = kPi * sx * cy;
        eps(0, 1) = eps(1, 0) = 0.5 * kPi * (sx * cy + cx * sy);
        return stiffness_apply(eps, p);
    };
    prob.f = [p](Point2 q) {
        const double ss = std::sin(kPi * q.x) * std::sin(kPi * q.y);
        const double cc = std::cos(kPi * q.x) * std::cos(kPi * q.y);
        const double v = kPi * kPi * (2.0 * p.mu * ss + (p.lambda + p.mu) * (ss - cc));
        return Eigen::Vector2d(v, v);
    };
    return prob;
}

Problem problem_locking_square(double E, double nu) {
    Problem prob;
    prob.name = "locking-square";
    prob.initial_mesh = [] { return unit_square_mesh(1); };
    prob.lame = lame_from_E_nu(E, nu);
    const double mu = prob.lame.mu;
    // u = curl(psi) with psi = sin²(pi x) sin²(pi y)/2, so div u = 0 and
    // sigma = 2 mu eps(u): the problem data never sees lambda.
    prob.exact_u = [](Point2 q) {
        const double sx = std::sin(kPi * q.x), cx = std::cos(kPi * q.x);
        const double sy = std::sin(kPi * q.y), cy = std::cos(kPi * q.y);
        return Eigen::Vector2d(kPi * sx * sx * sy * cy, -kPi * sx * cx * sy * sy);
    };
    prob.exact_sigma = [mu](Point2 q) -> Eigen::Matrix2d {
        const double s2x = std::sin(2.0 * kPi * q.x), c2x = std::cos(2.0 * kPi * q.x);
        const double s2y = std::sin(2.0 * kPi * q.y), c2y = std::cos(2.0 * kPi * q.y);
        const double sx = std::sin(kPi * q.x), sy = std::sin(kPi * q.y);
        Eigen::Matrix2d eps;
        eps(0, 0) = 0.5 * kPi * kPi * s2x * s2y;
        eps(1, 1) = -eps(0, 0);
        eps(0, 1) = eps(1, 0) = 0.5 * kPi * kPi * (sx * sx * c2y - c2x * sy * sy);
        return 2.0 * mu * eps;
    };
    prob.f = [mu](Point2 q) {
        const double c = 2.0 * kPi * kPi * kPi * mu;
        return Eigen::Vector2d(
            c * (1.0 - 2.0 * std::cos(2.0 * kPi * q.x)) * std::sin(kPi * q.y) *
                std::cos(kPi * q.y),
            c * (2.0 * std::cos(2.0 * kPi * q.y) - 1.0) * std::sin(kPi * q.x) *
                std::cos(kPi * q.x));
    };
    return prob;
}

Problem problem_lshape(double E, double nu) {
    Problem prob;
    prob.name = "lshape";
    prob.initial_mesh = [] { return l_shape_mesh(); };
    prob.lame = lame_from_E_nu(E, nu);
    prob.f = [](Point2 q) {
        const bool in_block =
            q.x * q.y >= 0.0 && std::max(std::abs(q.x), std::abs(q.y)) <= 0.5;
        return in_block ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 0.0);
    };
    return prob;
}

Problem make_problem(const std::string& name, double E, double nu) {
    if (name == "smooth-square") return problem_smooth_square(lame_from_E_nu(E, nu));
    if (name == "locking-square") return problem_locking_square(E, nu);
    if (name == "lshape") return problem_lshape(E, nu);
    throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace elastodpg
