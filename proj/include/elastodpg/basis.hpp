#pragma once

#include <Eigen/Dense>
#include <vector>

#include "elastodpg/mesh.hpp"
#include "elastodpg/quadrature.hpp"

namespace elastodpg {

inline int triangle_space_dim(int degree) {
    return (degree + 1) * (degree + 2) / 2;
}

/// L²-orthonormal modal basis of P^k on the reference triangle
/// conv{(0,0),(1,0),(0,1)} (Dubiner basis via scaled Legendre × Jacobi),
/// ordered by total degree so the bases are nested across k.
class TriangleBasis {
public:
    explicit TriangleBasis(int degree);

    int degree() const { return degree_; }
    int dim() const { return triangle_space_dim(degree_); }

    /// Values per (basis function, point): dim x npts.
    Eigen::MatrixXd values(const std::vector<Point2>& pts) const;
    Eigen::MatrixXd values(const QuadratureRule& q) const;

    /// Reference-coordinate gradients, each dim x npts.
    void gradients(const std::vector<Point2>& pts, Eigen::MatrixXd& dx,
                   Eigen::MatrixXd& dy) const;
    void gradients(const QuadratureRule& q, Eigen::MatrixXd& dx,
                   Eigen::MatrixXd& dy) const;

private:
    void eval(const std::vector<Point2>& pts, Eigen::MatrixXd* v,
              Eigen::MatrixXd* dx, Eigen::MatrixXd* dy) const;

    int degree_;
};

/// Affine reference-to-physical map F(r) = origin + J r of a mesh triangle.
struct AffineMap {
    Point2 origin;
    Eigen::Matrix2d J;
    Eigen::Matrix2d Jinv;
    double det = 0.0;  // = 2 |T| > 0

    Point2 apply(Point2 r) const {
        return {origin.x + J(0, 0) * r.x + J(0, 1) * r.y,
                origin.y + J(1, 0) * r.x + J(1, 1) * r.y};
    }
};

AffineMap affine_map(const Mesh& m, int t);

/// Orthonormal Legendre basis on [0,1]: row i is t -> sqrt(2i+1) P_i(2t-1),
/// for i = 0..degree; result (degree+1) x |t|.
Eigen::MatrixXd legendre_values_1d(int degree, const std::vector<double>& t);

/// Lagrange basis for the given interpolation nodes; result |nodes| x |t|.
Eigen::MatrixXd lagrange_values_1d(const std::vector<double>& nodes,
                                   const std::vector<double>& t);

}  // namespace elastodpg
