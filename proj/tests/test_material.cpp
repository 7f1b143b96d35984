#include "elastodpg/material.hpp"
#include "elastodpg/problem.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace elastodpg;

namespace {

constexpr double kPi = std::numbers::pi;

// Five-point central difference, O(h^4).
template <typename F>
double fd(const F& f, double h) {
    return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

// Divergence of a matrix field by finite differences of its rows.
template <typename Sigma>
Eigen::Vector2d fd_div(const Sigma& sigma, Point2 q, double h) {
    Eigen::Vector2d d;
    for (int i = 0; i < 2; ++i) {
        d(i) = fd([&](double e) { return sigma({q.x + e, q.y})(i, 0); }, h) +
               fd([&](double e) { return sigma({q.x, q.y + e})(i, 1); }, h);
    }
    return d;
}

}  // namespace

TEST_CASE("compliance closed forms") {
    const LameParams p{1.0, 1.0};
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    CHECK((compliance_apply(id, p) - 0.25 * id).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::Matrix2d as;
    as << 0, 1, -1, 0;
    CHECK((compliance_apply(as, p) - as).cwiseAbs().maxCoeff() < 1e-15);

    const Eigen::Matrix2d d31 = Eigen::Vector2d(3.0, 1.0).asDiagonal();
    const Eigen::Matrix2d d10 = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    CHECK((compliance_apply(d31, p) - d10).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stiffness closed forms and inverse pairing") {
    const LameParams p{1.0, 1.0};
    const Eigen::Matrix2d d10 = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    const Eigen::Matrix2d d31 = Eigen::Vector2d(3.0, 1.0).asDiagonal();
    CHECK((stiffness_apply(d10, p) - d31).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_EQ(stiffness_apply(Eigen::Matrix2d::Zero(), p).cwiseAbs().maxCoeff(), 0.0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const LameParams q : {LameParams{1.0, 1.0}, LameParams{57692.3, 38461.5},
                               LameParams{1e12, 1.0}}) {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::Matrix2d eps;
            const double a = unif(rng), b = unif(rng), c = unif(rng);
            eps << a, c, c, b;
            const Eigen::Matrix2d stress = stiffness_apply(eps, q);
            const Eigen::Matrix2d back = compliance_apply(stress, q);
            // Relative to the stress scale: the round trip cancels two terms
            // of size ~lambda, which is all floating point can promise.
            CHECK((back - eps).cwiseAbs().maxCoeff() <
                  1e-12 * std::max(1.0, stress.norm() / (2.0 * q.mu)));
        }
    }
}

TEST_CASE("compliance acts separately on symmetric and antisymmetric parts") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const LameParams p{4.2, 0.7};
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Matrix2d tau;
        tau << unif(rng), unif(rng), unif(rng), unif(rng);
        const Eigen::Matrix2d a = compliance_apply(tau, p);
        const Eigen::Matrix2d sym = 0.5 * (tau + tau.transpose());
        CHECK((0.5 * (a - a.transpose()) - (tau - sym)).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((0.5 * (a + a.transpose()) - compliance_apply(sym, p)).cwiseAbs().maxCoeff() <
              1e-14);
    }
    // lambda -> infinity is finite: the identity (pure volumetric) maps to ~0.
    const LameParams incompressible{1e12, 1.0};
    const Eigen::Matrix2d ai =
        compliance_apply(Eigen::Matrix2d::Identity(), incompressible);
    CHECK(ai.allFinite());
    CHECK(ai.cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("Lame conversion") {
    const LameParams p = lame_from_E_nu(1e5, 0.3);
    CHECK_EQ(p.mu, doctest::Approx(1e5 / 2.6).epsilon(1e-12));
    CHECK_EQ(p.lambda, doctest::Approx(3e4 / 0.52).epsilon(1e-12));

    const LameParams q = lame_from_E_nu(7.0, 0.0);
    CHECK_EQ(q.lambda, 0.0);
    CHECK_EQ(q.mu, doctest::Approx(3.5));

    CHECK(lame_from_E_nu(1.0, 0.4999).lambda > lame_from_E_nu(1.0, 0.499).lambda);
    CHECK_THROWS_AS(lame_from_E_nu(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(lame_from_E_nu(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(lame_from_E_nu(0.0, 0.3), std::invalid_argument);
}

TEST_CASE("smooth square problem") {
    const Problem prob = problem_smooth_square({1.0, 1.0});
    CHECK_EQ(prob.initial_mesh().num_triangles(), 2);

    const Eigen::Vector2d mid = prob.exact_u({0.5, 0.5});
    CHECK_EQ(mid(0), doctest::Approx(1.0).epsilon(1e-14));
    CHECK_EQ(mid(1), doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double t = unif(rng);
        for (Point2 q : {Point2{t, 0.0}, Point2{t, 1.0}, Point2{0.0, t}, Point2{1.0, t}})
            CHECK(prob.exact_u(q).norm() < 1e-14);
    }

    // Independently recompute eps(u) and check sigma = C eps(u).
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        const Point2 q{interior(rng), interior(rng)};
        const double sx = std::sin(kPi * q.x), cx = std::cos(kPi * q.x);
        const double sy = std::sin(kPi * q.y), cy = std::cos(kPi * q.y);
        Eigen::Matrix2d eps;
        eps << kPi * cx * sy, 0.5 * kPi * std::sin(kPi * (q.x + q.y)),
            0.5 * kPi * std::sin(kPi * (q.x + q.y)), kPi * sx * cy;
        const Eigen::Matrix2d sigma = prob.exact_sigma(q);
        CHECK((sigma - stiffness_apply(eps, prob.lame)).cwiseAbs().maxCoeff() <
              1e-10 * sigma.norm());
        // PDE residual with a finite-difference divergence of exact_sigma.
        const Eigen::Vector2d res = prob.f(q) + fd_div(prob.exact_sigma, q, 1e-3);
        CHECK(res.cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("locking square problem") {
    const Problem prob = problem_locking_square(1e5, 0.3);
    const double mu = prob.lame.mu;
    CHECK_EQ(mu, doctest::Approx(1e5 / 2.6));

    // Same mu at a different nu: sigma and f must not change at all.
    const Problem other = problem_locking_square(1e5 * 2.998 / 2.6, 0.499);
    CHECK_EQ(other.lame.mu, doctest::Approx(mu).epsilon(1e-14));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        const Point2 q{interior(rng), interior(rng)};
        // Incompressibility, via high-order finite differences of u.
        const double div =
            fd([&](double e) { return prob.exact_u({q.x + e, q.y})(0); }, 5e-4) +
            fd([&](double e) { return prob.exact_u({q.x, q.y + e})(1); }, 5e-4);
        CHECK(std::abs(div) < 1e-10);
        // PDE residual against the stated closed form of f.
        const Eigen::Vector2d res = prob.f(q) + fd_div(prob.exact_sigma, q, 1e-3);
        CHECK(res.cwiseAbs().maxCoeff() < 1e-7 * mu);
        CHECK((other.exact_sigma(q) - prob.exact_sigma(q)).cwiseAbs().maxCoeff() <
              1e-8 * mu);
    }

    // Direct evaluation of the closed form at (1/4, 1/4).
    const Eigen::Vector2d f = prob.f({0.25, 0.25});
    CHECK_EQ(f(0), doctest::Approx(kPi * kPi * kPi * mu).epsilon(1e-12));
    CHECK_EQ(f(1), doctest::Approx(-kPi * kPi * kPi * mu).epsilon(1e-12));

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double t = unif(rng);
        for (Point2 q : {Point2{t, 0.0}, Point2{t, 1.0}, Point2{0.0, t}, Point2{1.0, t}})
            CHECK(prob.exact_u(q).norm() < 1e-12);
    }
}

TEST_CASE("L-shape problem") {
    const Problem prob = problem_lshape(1.0, 0.4);
    CHECK_EQ(prob.initial_mesh().num_triangles(), 6);
    CHECK(!prob.exact_u);
    CHECK(!prob.exact_sigma);
    CHECK_EQ(prob.f({0.25, 0.25}), Eigen::Vector2d(1.0, 0.0));
    CHECK_EQ(prob.f({-0.25, 0.25}), Eigen::Vector2d(0.0, 0.0));
    CHECK_EQ(prob.f({0.75, 0.25}), Eigen::Vector2d(0.0, 0.0));
    CHECK_EQ(prob.f({-0.25, -0.25}), Eigen::Vector2d(1.0, 0.0));
}

TEST_CASE("problem registry") {
    CHECK_EQ(make_problem("smooth-square", 2.5, 0.25).lame.lambda, doctest::Approx(1.0));
    CHECK_EQ(make_problem("smooth-square", 2.5, 0.25).lame.mu, doctest::Approx(1.0));
    CHECK_EQ(make_problem("locking-square", 1e5, 0.4).name, "locking-square");
    CHECK_EQ(make_problem("lshape", 1.0, 0.4).name, "lshape");
    CHECK_THROWS_AS(make_problem("poisson", 1.0, 0.3), std::invalid_argument);
}
