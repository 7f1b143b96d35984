#include "elastodpg/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace elastodpg {

namespace {

struct Rule1D {
    std::vector<double> x, w;  // nodes in (-1,1); weights absorb the Jacobi weight
};

// Gauss rule for the weight (1-x)^a (1+x)^b on [-1,1] via the Golub-Welsch
// eigenvalue method on the symmetrized Jacobi recurrence.
Rule1D gauss_jacobi(int n, double a, double b) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            J(0, 0) = (b - a) / (a + b + 2.0);
        } else {
            const double s = 2.0 * k + a + b;
            J(k, k) = (b * b - a * a) / (s * (s + 2.0));
            const double beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
                                (s * s * (s + 1.0) * (s - 1.0));
            J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) *
                       std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    return r;
}

}  // namespace

QuadratureRule quad_rule(int degree) {
    if (degree < 0 || degree > 20)
        throw std::invalid_argument("quad_rule: unsupported degree " +
                                    std::to_string(degree));
    const int n = degree / 2 + 1;
    const Rule1D gx = gauss_jacobi(n, 0.0, 0.0);
    const Rule1D gy = gauss_jacobi(n, 1.0, 0.0);  // absorbs the Duffy Jacobian

    QuadratureRule q;
    q.exactness_degree = degree;
    q.points.reserve(n * n);
    q.weights.reserve(n * n);
    for (int i = 0; i < n; ++i) {
        const double eta = 0.5 * (1.0 + gy.x[i]);
        const double wy = gy.w[i] / 4.0;
        for (int j = 0; j < n; ++j) {
            const double xi = 0.5 * (1.0 + gx.x[j]);
            const double wx = gx.w[j] / 2.0;
            const double x = xi * (1.0 - eta);
            const double y = eta;
            q.points.push_back({1.0 - x - y, x, y});
            q.weights.push_back(wx * wy);
        }
    }
    return q;
}

GaussRule1D gauss_rule_1d(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule_1d: need n >= 1");
    const Rule1D g = gauss_jacobi(n, 0.0, 0.0);
    GaussRule1D r;
    r.points.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.points[i] = 0.5 * (1.0 + g.x[i]);
        r.weights[i] = 0.5 * g.w[i];
    }
    return r;
}

std::vector<double> lobatto_nodes_1d(int n) {
    if (n < 2) throw std::invalid_argument("lobatto_nodes_1d: need n >= 2");
    std::vector<double> nodes;
    nodes.reserve(n);
    nodes.push_back(0.0);
    if (n > 2) {
        // Interior Lobatto nodes are the Gauss-Jacobi(1,1) nodes.
        const Rule1D g = gauss_jacobi(n - 2, 1.0, 1.0);
        for (double x : g.x) nodes.push_back(0.5 * (1.0 + x));
    }
    nodes.push_back(1.0);
    return nodes;
}

}  // namespace elastodpg
