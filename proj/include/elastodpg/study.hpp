#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "elastodpg/adaptivity.hpp"
#include "elastodpg/assembly.hpp"
#include "elastodpg/postprocess.hpp"
#include "elastodpg/problem.hpp"

namespace elastodpg {

/// One row of a study table. Quantities that do not apply to a run (no exact
/// solution, no postprocessing, first level of an EOC column) are NaN and are
/// written as empty CSV cells.
struct StudyRecord {
    int level = 0;
    int ndof = 0;
    double h_max = 0.0;
    double err_u = std::numeric_limits<double>::quiet_NaN();
    double err_u_aug = std::numeric_limits<double>::quiet_NaN();
    double err_post = std::numeric_limits<double>::quiet_NaN();
    double err_proj = std::numeric_limits<double>::quiet_NaN();
    double err_gap = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double eoc_u = std::numeric_limits<double>::quiet_NaN();
    double eoc_aug = std::numeric_limits<double>::quiet_NaN();
    double eoc_post = std::numeric_limits<double>::quiet_NaN();
    double eoc_gap = std::numeric_limits<double>::quiet_NaN();
};

/// log(e_prev/e_cur) / log(h_prev/h_cur); NaN unless both errors are positive
/// and h decreases.
double eoc(double e_prev, double e_cur, double h_prev, double h_cur);

/// Rate against dof counts for meshes without a uniform h:
/// 2 log(e_prev/e_cur) / log(n_cur/n_prev).
double eoc_ndof(double e_prev, double e_cur, int n_prev, int n_cur);

/// Least-squares slope of log(y) against log(x) over the last n points.
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y, int n);

/// L2 distance between the discrete displacement and a reference field.
double l2_field_error(const Mesh& m, const SpaceLayout& layout,
                      const Eigen::VectorXd& coeffs,
                      const std::function<Eigen::Vector2d(Point2)>& ref);

struct StudyOptions {
    bool with_post = false;
    SolveOptions solve;
};

/// Uniform refinement study on a manufactured problem. Level 0 is one uniform
/// refinement of the problem's coarse mesh; each further level refines again.
std::vector<StudyRecord> run_convergence(const Problem& prob, int k, int j,
                                         int levels,
                                         const StudyOptions& opts = {});

struct LockingStudy {
    std::vector<double> nu;
    std::vector<std::vector<StudyRecord>> records;  // parallel to nu
    /// max/min of err_u across nu on the finest (shared) level.
    double finest_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Runs the locking benchmark for each Poisson ratio on the same level
/// sequence.
LockingStudy run_locking(const std::vector<double>& nu_list, double E, int k,
                         int j, int levels, const StudyOptions& opts = {});

struct LshapeStudy {
    std::vector<StudyRecord> records;
    /// |slope| of log(eta) vs log(ndof) over the last three records.
    double slope = std::numeric_limits<double>::quiet_NaN();
    Mesh final_mesh;
};

/// L-shape estimator study; mode is "uniform" or "adaptive" (Dörfler/theta).
LshapeStudy run_lshape(const std::string& mode, double theta, int steps, int k,
                       int j, const StudyOptions& opts = {});

/// CSV with the fixed header
/// level,ndof,hmax,err_u,err_u_aug,err_post,err_proj,err_gap,eta,eoc_u,
/// eoc_aug,eoc_post,eoc_gap; 12 significant digits, NaN as empty cell, LF
/// line endings. Byte-identical for identical inputs.
void write_csv(const std::vector<StudyRecord>& records, std::ostream& os);
void write_csv(const std::vector<StudyRecord>& records,
               const std::string& path);

}  // namespace elastodpg
