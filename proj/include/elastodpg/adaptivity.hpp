#pragma once

#include <limits>
#include <vector>

#include "elastodpg/postprocess.hpp"

namespace elastodpg {

/// Minimal Dörfler set: greedy over indicators sorted descending (ties by
/// lower element id) until sum of marked eta_T^2 >= theta * total. Returns
/// ascending element ids. theta must lie in (0, 1].
std::vector<int> doerfler_mark(const Eigen::VectorXd& eta_T, double theta);

struct AfemStep {
    int step = 0;
    int ndof = 0;
    double h_max = 0.0;
    double eta = 0.0;
    Eigen::VectorXd eta_T;
    int n_marked = 0;
    // NaN unless the problem has an exact solution (and with_post for the
    // postprocessed error).
    double err_u = std::numeric_limits<double>::quiet_NaN();
    double err_post = std::numeric_limits<double>::quiet_NaN();
};

struct AfemOptions {
    double theta = 0.5;
    int steps = 1;
    bool with_post = false;
    SolveOptions solve;
};

struct AfemRun {
    std::vector<AfemStep> steps;
    Mesh final_mesh;  // mesh of the last recorded step
};

/// solve -> estimate -> mark -> bisect, opts.steps times. Stops early if the
/// estimator vanishes (nothing left to mark).
AfemRun afem_loop(const Problem& prob, int k, int j, const AfemOptions& opts);

}  // namespace elastodpg
