#pragma once

#include <array>
#include <vector>

namespace elastodpg {

/// Quadrature on the reference triangle conv{(0,0),(1,0),(0,1)}, stored in
/// barycentric coordinates (ordered to match those vertices) with weights in
/// the reference measure, so they sum to the reference area 1/2.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int exactness_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
    double x(int i) const { return points[i][1]; }
    double y(int i) const { return points[i][2]; }
};

/// Collapsed (Duffy) Gauss rule exact for all polynomials of total degree
/// <= degree. Supported range 0..20.
QuadratureRule quad_rule(int degree);

struct GaussRule1D {
    std::vector<double> points;   // inside (0,1)
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule on [0,1]; exact to degree 2n-1.
GaussRule1D gauss_rule_1d(int n);

/// Gauss-Lobatto nodes on [0,1] including both endpoints, n >= 2, ascending.
std::vector<double> lobatto_nodes_1d(int n);

}  // namespace elastodpg
