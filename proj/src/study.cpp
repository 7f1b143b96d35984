#include "elastodpg/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "elastodpg/basis.hpp"
#include "elastodpg/layout.hpp"
#include "elastodpg/quadrature.hpp"

namespace elastodpg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// ||u_h - Pi u|| from modal coefficients: both fields live in the
/// reference-orthonormal basis, so the element contribution is det * sum of
/// squared coefficient differences.
double modal_gap(const Mesh& m, const SpaceLayout& lay,
                 const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& px,
                 const Eigen::MatrixXd& py) {
    double acc = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& dofs = lay.element_dofs[t];
        double s = 0.0;
        for (int mode = 0; mode < lay.dim_u_mode; ++mode) {
            const double dx = coeffs(dofs[lay.col_u(0, mode)]) - px(t, mode);
            const double dy = coeffs(dofs[lay.col_u(1, mode)]) - py(t, mode);
            s += dx * dx + dy * dy;
        }
        acc += affine_map(m, t).det * s;
    }
    return std::sqrt(acc);
}

double projection_error(const Mesh& m, int degree, const Eigen::MatrixXd& px,
                        const Eigen::MatrixXd& py,
                        const std::function<Eigen::Vector2d(Point2)>& exact) {
    const QuadratureRule q = quad_rule(std::min(2 * degree + 8, 20));
    const Eigen::MatrixXd tab = TriangleBasis(degree).values(q);
    double acc = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const AffineMap map = affine_map(m, t);
        const Eigen::RowVectorXd vx = px.row(t) * tab;
        const Eigen::RowVectorXd vy = py.row(t) * tab;
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::Vector2d e = exact(map.apply({q.x(p), q.y(p)}));
            const double dx = e(0) - vx(p);
            const double dy = e(1) - vy(p);
            acc += map.det * q.weights[p] * (dx * dx + dy * dy);
        }
    }
    return std::sqrt(acc);
}

StudyRecord study_record(const Mesh& m, const SpaceLayout& lay,
                         const Problem& prob, const SolutionFields& sol,
                         int level, const StudyOptions& opts) {
    StudyRecord r;
    r.level = level;
    r.ndof = lay.n_free;
    r.h_max = m.h_max();
    r.eta = sol.eta;
    if (!prob.exact_u) return r;

    r.err_u = l2_error_u(m, lay, sol.coeffs, prob.exact_u);
    if (lay.j == 1) r.err_u_aug = r.err_u;
    const int deg = lay.k + lay.j;
    const Eigen::MatrixXd px =
        l2_project([&](Point2 p) { return prob.exact_u(p)(0); }, deg, m);
    const Eigen::MatrixXd py =
        l2_project([&](Point2 p) { return prob.exact_u(p)(1); }, deg, m);
    r.err_proj = projection_error(m, deg, px, py, prob.exact_u);
    r.err_gap = modal_gap(m, lay, sol.coeffs, px, py);
    if (opts.with_post) {
        const PostprocessResult pr =
            postprocess(m, lay, sol, prob.lame, opts.solve.threads);
        r.err_post = l2_error_post(m, pr, prob.exact_u);
    }
    return r;
}

void add_eocs(std::vector<StudyRecord>& recs) {
    for (std::size_t i = 1; i < recs.size(); ++i) {
        const StudyRecord& a = recs[i - 1];
        StudyRecord& b = recs[i];
        b.eoc_u = eoc(a.err_u, b.err_u, a.h_max, b.h_max);
        b.eoc_aug = eoc(a.err_u_aug, b.err_u_aug, a.h_max, b.h_max);
        b.eoc_post = eoc(a.err_post, b.err_post, a.h_max, b.h_max);
        b.eoc_gap = eoc(a.err_gap, b.err_gap, a.h_max, b.h_max);
    }
}

void append_cell(std::string& line, double v) {
    if (std::isnan(v)) return;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    line += buf;
}

}  // namespace

double eoc(double e_prev, double e_cur, double h_prev, double h_cur) {
    if (!(e_prev > 0.0) || !(e_cur > 0.0) || !(h_prev > 0.0) ||
        !(h_cur > 0.0) || !(h_cur < h_prev))
        return kNaN;
    return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

double eoc_ndof(double e_prev, double e_cur, int n_prev, int n_cur) {
    if (!(e_prev > 0.0) || !(e_cur > 0.0) || n_prev <= 0 || n_cur <= n_prev)
        return kNaN;
    return 2.0 * std::log(e_prev / e_cur) /
           std::log(static_cast<double>(n_cur) / static_cast<double>(n_prev));
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y, int n) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog_slope: size mismatch");
    const int total = static_cast<int>(x.size());
    const int m = std::min(n, total);
    if (m < 2) return kNaN;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = total - m; i < total; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return kNaN;
    return (m * sxy - sx * sy) / denom;
}

double l2_field_error(const Mesh& m, const SpaceLayout& layout,
                      const Eigen::VectorXd& coeffs,
                      const std::function<Eigen::Vector2d(Point2)>& ref) {
    return l2_error_u(m, layout, coeffs, ref);
}

std::vector<StudyRecord> run_convergence(const Problem& prob, int k, int j,
                                         int levels,
                                         const StudyOptions& opts) {
    if (levels < 1)
        throw std::invalid_argument("run_convergence: levels must be >= 1");
    std::vector<StudyRecord> recs;
    recs.reserve(levels);
    Mesh mesh = uniform_refine(prob.initial_mesh());
    for (int level = 0; level < levels; ++level) {
        SpaceLayout lay = build_layout(mesh, k, j);
        apply_dirichlet(mesh, prob.dirichlet_data, lay);
        const SolutionFields sol = solve_dpg(mesh, lay, prob, opts.solve);
        recs.push_back(study_record(mesh, lay, prob, sol, level, opts));
        if (level + 1 < levels) mesh = uniform_refine(mesh);
    }
    add_eocs(recs);
    return recs;
}

LockingStudy run_locking(const std::vector<double>& nu_list, double E, int k,
                         int j, int levels, const StudyOptions& opts) {
    if (nu_list.empty())
        throw std::invalid_argument("run_locking: empty nu list");
    LockingStudy out;
    out.nu = nu_list;
    double emin = std::numeric_limits<double>::infinity();
    double emax = 0.0;
    for (double nu : nu_list) {
        const Problem prob = problem_locking_square(E, nu);
        out.records.push_back(run_convergence(prob, k, j, levels, opts));
        const double e = out.records.back().back().err_u;
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    out.finest_ratio = emax / emin;
    return out;
}

LshapeStudy run_lshape(const std::string& mode, double theta, int steps, int k,
                       int j, const StudyOptions& opts) {
    if (steps < 1)
        throw std::invalid_argument("run_lshape: steps must be >= 1");
    const Problem prob = problem_lshape(1.0, 0.4);
    LshapeStudy out;
    if (mode == "uniform") {
        Mesh mesh = prob.initial_mesh();
        for (int s = 0; s < steps; ++s) {
            SpaceLayout lay = build_layout(mesh, k, j);
            apply_dirichlet(mesh, prob.dirichlet_data, lay);
            const SolutionFields sol = solve_dpg(mesh, lay, prob, opts.solve);
            out.records.push_back(study_record(mesh, lay, prob, sol, s, opts));
            if (s + 1 < steps) mesh = uniform_refine(mesh);
        }
        out.final_mesh = mesh;
    } else if (mode == "adaptive") {
        AfemOptions ao;
        ao.theta = theta;
        ao.steps = steps;
        ao.with_post = opts.with_post;
        ao.solve = opts.solve;
        AfemRun run = afem_loop(prob, k, j, ao);
        for (const AfemStep& st : run.steps) {
            StudyRecord r;
            r.level = st.step;
            r.ndof = st.ndof;
            r.h_max = st.h_max;
            r.eta = st.eta;
            r.err_u = st.err_u;
            r.err_post = st.err_post;
            out.records.push_back(r);
        }
        out.final_mesh = std::move(run.final_mesh);
    } else {
        throw std::invalid_argument("run_lshape: mode must be uniform|adaptive");
    }
    std::vector<double> xs, ys;
    for (const StudyRecord& r : out.records) {
        xs.push_back(static_cast<double>(r.ndof));
        ys.push_back(r.eta);
    }
    out.slope = std::abs(fit_loglog_slope(xs, ys, 3));
    return out;
}

void write_csv(const std::vector<StudyRecord>& records, std::ostream& os) {
    os << "level,ndof,hmax,err_u,err_u_aug,err_post,err_proj,err_gap,eta,"
          "eoc_u,eoc_aug,eoc_post,eoc_gap\n";
    for (const StudyRecord& r : records) {
        std::string line = std::to_string(r.level);
        line += ',';
        line += std::to_string(r.ndof);
        const double cols[] = {r.h_max,  r.err_u,   r.err_u_aug, r.err_post,
                               r.err_proj, r.err_gap, r.eta,     r.eoc_u,
                               r.eoc_aug, r.eoc_post, r.eoc_gap};
        for (double v : cols) {
            line += ',';
            append_cell(line, v);
        }
        os << line << '\n';
    }
}

void write_csv(const std::vector<StudyRecord>& records,
               const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(records, f);
}

}  // namespace elastodpg
