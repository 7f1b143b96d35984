#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elastodpg/study.hpp"

namespace {

elastodpg::SolveOptions solve_options(const std::string& solver, double tol,
                                      const std::string& threads) {
    elastodpg::SolveOptions o;
    o.solver = solver == "cg" ? elastodpg::SolveOptions::Solver::cg
                              : elastodpg::SolveOptions::Solver::cholesky;
    o.tol = tol;
    o.threads = threads == "auto" ? 0 : std::stoi(threads);
    return o;
}

// The convergence command runs the manufactured benchmarks with their
// published material parameters; the nu sweep is the locking command's job.
elastodpg::Problem study_problem(const std::string& name) {
    if (name == "smooth-square") return elastodpg::problem_smooth_square({});
    if (name == "locking-square")
        return elastodpg::problem_locking_square(1e5, 0.3);
    throw std::invalid_argument(
        "convergence requires an exact solution; use smooth-square or "
        "locking-square");
}

void emit(const std::vector<elastodpg::StudyRecord>& recs,
          const std::string& out) {
    if (out.empty())
        elastodpg::write_csv(recs, std::cout);
    else
        elastodpg::write_csv(recs, out);
}

// base.csv + nu=0.3 -> base-nu0.3.csv
std::string nu_suffixed(const std::string& base, double nu) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-nu%g", nu);
    const auto slash = base.find_last_of('/');
    const auto dot = base.rfind('.');
    if (dot == std::string::npos ||
        (slash != std::string::npos && dot < slash))
        return base + buf;
    return base.substr(0, dot) + buf + base.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DPG solver for planar linear elasticity"};
    app.require_subcommand(1);

    std::string solver = "cholesky";
    double tol = 1e-10;
    std::string threads = "auto";
    app.add_option("--solver", solver, "Linear solver for the condensed system")
        ->check(CLI::IsMember({"cholesky", "cg"}));
    app.add_option("--tol", tol, "Iterative solver tolerance")
        ->capture_default_str();
    app.add_option("--threads", threads, "Assembly threads: a count or 'auto'")
        ->capture_default_str();

    int k = 0, j = 0, levels = 5, steps = 10;
    bool post = false;
    std::string out, problem = "smooth-square", mode = "adaptive";
    std::vector<double> nu_list;
    double E = 1e5, theta = 0.5;

    CLI::App* conv =
        app.add_subcommand("convergence", "Uniform-refinement error table");
    conv->fallthrough();
    conv->add_option("--problem", problem, "smooth-square or locking-square")
        ->required();
    conv->add_option("--k", k, "Trial polynomial degree")->required();
    conv->add_option("--j", j, "Displacement augmentation (0 or 1)")
        ->check(CLI::Range(0, 1))
        ->required();
    conv->add_option("--levels", levels, "Number of refinement levels")
        ->required();
    conv->add_flag("--post", post, "Also compute the postprocessed error");
    conv->add_option("--out", out, "CSV output path (default: stdout)");

    CLI::App* lock =
        app.add_subcommand("locking", "Poisson-ratio robustness sweep");
    lock->fallthrough();
    lock->add_option("--nu", nu_list, "Comma-separated Poisson ratios")
        ->delimiter(',')
        ->required();
    lock->add_option("--E", E, "Young's modulus")->required();
    lock->add_option("--k", k, "Trial polynomial degree")->required();
    lock->add_option("--j", j, "Displacement augmentation (0 or 1)")
        ->check(CLI::Range(0, 1))
        ->required();
    lock->add_option("--levels", levels, "Number of refinement levels")
        ->required();
    lock->add_flag("--post", post, "Also compute the postprocessed error");
    lock->add_option("--out", out,
                     "CSV base path; one file per nu (default: stdout)");

    CLI::App* lsh =
        app.add_subcommand("lshape", "L-shape estimator study (no exact solution)");
    lsh->fallthrough();
    lsh->add_option("--mode", mode, "uniform or adaptive")
        ->check(CLI::IsMember({"uniform", "adaptive"}))
        ->required();
    lsh->add_option("--theta", theta, "Dörfler marking parameter")
        ->capture_default_str();
    lsh->add_option("--steps", steps, "Number of refinement steps")->required();
    lsh->add_option("--k", k, "Trial polynomial degree")->required();
    lsh->add_option("--j", j, "Displacement augmentation (0 or 1)")
        ->check(CLI::Range(0, 1))
        ->required();
    lsh->add_flag("--post", post, "Run the postprocessing each step");
    lsh->add_option("--out", out, "CSV output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        elastodpg::StudyOptions opts;
        opts.with_post = post;
        opts.solve = solve_options(solver, tol, threads);

        if (conv->parsed()) {
            emit(elastodpg::run_convergence(study_problem(problem), k, j,
                                            levels, opts),
                 out);
        } else if (lock->parsed()) {
            const elastodpg::LockingStudy st =
                elastodpg::run_locking(nu_list, E, k, j, levels, opts);
            for (std::size_t i = 0; i < st.nu.size(); ++i) {
                if (out.empty()) {
                    std::printf("# nu=%g\n", st.nu[i]);
                    elastodpg::write_csv(st.records[i], std::cout);
                } else {
                    elastodpg::write_csv(st.records[i],
                                         nu_suffixed(out, st.nu[i]));
                }
            }
            std::printf("# finest_err_u_ratio=%.6g\n", st.finest_ratio);
        } else if (lsh->parsed()) {
            const elastodpg::LshapeStudy st =
                elastodpg::run_lshape(mode, theta, steps, k, j, opts);
            emit(st.records, out);
            std::printf("# eta_ndof_slope=%.6g\n", st.slope);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
