#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>

#include "elastodpg/study.hpp"

namespace py = pybind11;
using namespace elastodpg;

namespace {

// Benchmark registry shared with the CLI: names map to the canonical
// material parameters of each study.
Problem study_problem(const std::string& name) {
    if (name == "smooth-square") return problem_smooth_square(LameParams{});
    if (name == "locking-square") return problem_locking_square(1e5, 0.3);
    throw std::invalid_argument("unknown problem '" + name +
                                "' (expected smooth-square or locking-square)");
}

StudyOptions make_options(bool with_post, const std::string& solver,
                          double tol, int threads) {
    StudyOptions o;
    o.with_post = with_post;
    if (solver == "cholesky")
        o.solve.solver = SolveOptions::Solver::cholesky;
    else if (solver == "cg")
        o.solve.solver = SolveOptions::Solver::cg;
    else
        throw std::invalid_argument("solver must be 'cholesky' or 'cg'");
    o.solve.tol = tol;
    o.solve.threads = threads;
    return o;
}

std::string record_repr(const StudyRecord& r) {
    std::ostringstream os;
    os << "StudyRecord(level=" << r.level << ", ndof=" << r.ndof
       << ", h_max=" << r.h_max << ", err_u=" << r.err_u << ", eta=" << r.eta
       << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "DPG solver for planar linear elasticity: convergence, "
              "locking and adaptive L-shape studies";

    py::class_<StudyRecord>(m, "StudyRecord",
                            "One refinement level of a study; quantities that "
                            "do not apply to the run are NaN.")
        .def_readonly("level", &StudyRecord::level)
        .def_readonly("ndof", &StudyRecord::ndof)
        .def_readonly("h_max", &StudyRecord::h_max)
        .def_readonly("err_u", &StudyRecord::err_u)
        .def_readonly("err_u_aug", &StudyRecord::err_u_aug)
        .def_readonly("err_post", &StudyRecord::err_post)
        .def_readonly("err_proj", &StudyRecord::err_proj)
        .def_readonly("err_gap", &StudyRecord::err_gap)
        .def_readonly("eta", &StudyRecord::eta)
        .def_readonly("eoc_u", &StudyRecord::eoc_u)
        .def_readonly("eoc_aug", &StudyRecord::eoc_aug)
        .def_readonly("eoc_post", &StudyRecord::eoc_post)
        .def_readonly("eoc_gap", &StudyRecord::eoc_gap)
        .def("__repr__", &record_repr);

    py::class_<LockingStudy>(m, "LockingStudy")
        .def_readonly("nu", &LockingStudy::nu)
        .def_readonly("records", &LockingStudy::records)
        .def_readonly("finest_ratio", &LockingStudy::finest_ratio);

    py::class_<LshapeStudy>(m, "LshapeStudy")
        .def_readonly("records", &LshapeStudy::records)
        .def_readonly("slope", &LshapeStudy::slope)
        .def_property_readonly("num_triangles", [](const LshapeStudy& s) {
            return s.final_mesh.num_triangles();
        });

    m.def(
        "convergence",
        [](const std::string& problem, int k, int j, int levels,
           bool with_post, const std::string& solver, double tol,
           int threads) {
            return run_convergence(study_problem(problem), k, j, levels,
                                   make_options(with_post, solver, tol,
                                                threads));
        },
        py::arg("problem"), py::arg("k"), py::arg("j"), py::arg("levels"),
        py::arg("with_post") = false, py::arg("solver") = "cholesky",
        py::arg("tol") = 1e-10, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>(),
        "Uniform-refinement error table for a named benchmark "
        "(smooth-square or locking-square).");

    m.def(
        "locking",
        [](const std::vector<double>& nu, double E, int k, int j, int levels,
           bool with_post, const std::string& solver, double tol,
           int threads) {
            return run_locking(nu, E, k, j, levels,
                               make_options(with_post, solver, tol, threads));
        },
        py::arg("nu"), py::arg("E"), py::arg("k"), py::arg("j"),
        py::arg("levels"), py::arg("with_post") = false,
        py::arg("solver") = "cholesky", py::arg("tol") = 1e-10,
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>(),
        "Poisson-ratio robustness sweep on the locking benchmark.");

    m.def(
        "lshape",
        [](const std::string& mode, double theta, int steps, int k, int j,
           bool with_post, const std::string& solver, double tol,
           int threads) {
            return run_lshape(mode, theta, steps, k, j,
                              make_options(with_post, solver, tol, threads));
        },
        py::arg("mode"), py::arg("theta") = 0.5, py::arg("steps") = 10,
        py::arg("k") = 1, py::arg("j") = 0, py::arg("with_post") = false,
        py::arg("solver") = "cholesky", py::arg("tol") = 1e-10,
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>(),
        "L-shape estimator study; mode is 'uniform' or 'adaptive'.");

    m.def(
        "csv",
        [](const std::vector<StudyRecord>& records) {
            std::ostringstream os;
            write_csv(records, os);
            return os.str();
        },
        py::arg("records"), "Study table as a CSV string.");

    m.def(
        "write_csv",
        [](const std::vector<StudyRecord>& records, const std::string& path) {
            write_csv(records, path);
        },
        py::arg("records"), py::arg("path"),
        "Write a study table to a CSV file.");

    m.attr("__version__") = "0.1.0";
}
