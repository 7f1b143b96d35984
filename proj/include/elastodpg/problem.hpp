#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "elastodpg/material.hpp"
#include "elastodpg/mesh.hpp"

namespace elastodpg {

/// A benchmark instance: coarse mesh, material, body force and (when the
/// solution is manufactured) the exact fields. The Dirichlet/Neumann split
/// lives on the mesh edge labels; dirichlet_data == nullptr means
/// homogeneous data.
struct Problem {
    std::string name;
    std::function<Mesh()> initial_mesh;
    LameParams lame;
    std::function<Eigen::Vector2d(Point2)> f;
    std::function<Eigen::Vector2d(Point2)> exact_u;      // may be empty
    std::function<Eigen::Matrix2d(Point2)> exact_sigma;  // may be empty
    std::function<Eigen::Vector2d(Point2)> dirichlet_data;
};

/// u = (sin(pi x) sin(pi y), sin(pi x) sin(pi y)) on the unit square,
/// f = -div(C eps(u)); fully clamped boundary.
Problem problem_smooth_square(const LameParams& p);

/// Divergence-free u = curl(sin²(pi x) sin²(pi y) / 2) on the unit square;
/// data depends on mu only, which makes the errors nu-robust.
Problem problem_locking_square(double E, double nu);

/// L-shape, u = 0 on the whole boundary, f = (1,0) on the block
/// {xy >= 0, max(|x|,|y|) <= 1/2}; no known exact solution.
Problem problem_lshape(double E, double nu);

/// Registry: `smooth-square`, `locking-square`, `lshape`.
Problem make_problem(const std::string& name, double E, double nu);

}  // namespace elastodpg
