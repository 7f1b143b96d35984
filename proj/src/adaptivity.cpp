#include "elastodpg/adaptivity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace elastodpg {

std::vector<int> doerfler_mark(const Eigen::VectorXd& eta_T, double theta) {
    if (eta_T.size() == 0)
        throw std::invalid_argument("doerfler_mark: empty indicator list");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("doerfler_mark: theta must be in (0, 1]");
    if (eta_T.minCoeff() < 0.0)
        throw std::invalid_argument("doerfler_mark: negative indicator");

    const int n = static_cast<int>(eta_T.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (eta_T(a) != eta_T(b)) return eta_T(a) > eta_T(b);
        return a < b;
    });

    const double target = theta * eta_T.squaredNorm();
    std::vector<int> marked;
    double acc = 0.0;
    for (int id : order) {
        if (eta_T(id) == 0.0 || acc >= target) break;
        marked.push_back(id);
        acc += eta_T(id) * eta_T(id);
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

AfemRun afem_loop(const Problem& prob, int k, int j, const AfemOptions& opts) {
    if (opts.steps < 1)
        throw std::invalid_argument("afem_loop: steps must be >= 1");
    AfemRun run;
    Mesh mesh = prob.initial_mesh();
    for (int s = 0; s < opts.steps; ++s) {
        SpaceLayout lay = build_layout(mesh, k, j);
        apply_dirichlet(mesh, prob.dirichlet_data, lay);
        const SolutionFields sol = solve_dpg(mesh, lay, prob, opts.solve);

        AfemStep st;
        st.step = s;
        st.ndof = lay.n_free;
        st.h_max = mesh.h_max();
        st.eta = sol.eta;
        st.eta_T = sol.eta_T;
        if (prob.exact_u) {
            st.err_u = l2_error_u(mesh, lay, sol.coeffs, prob.exact_u);
            if (opts.with_post) {
                const PostprocessResult pr =
                    postprocess(mesh, lay, sol, prob.lame, opts.solve.threads);
                st.err_post = l2_error_post(mesh, pr, prob.exact_u);
            }
        }
        const std::vector<int> marked = doerfler_mark(sol.eta_T, opts.theta);
        st.n_marked = static_cast<int>(marked.size());
        run.steps.push_back(st);

        if (s + 1 == opts.steps || marked.empty()) break;
        mesh = bisect(mesh, marked);
    }
    run.final_mesh = mesh;
    return run;
}

}  // namespace elastodpg
