#pragma once

#include <array>
#include <functional>
#include <vector>

#include "elastodpg/basis.hpp"
#include "elastodpg/mesh.hpp"

namespace elastodpg {

/// Global trial-space layout for U_h^{k,j}. Every degree of freedom has a
/// global id in the block order [sigma | u | flux | uhat]; constrained dofs
/// (uhat on the Dirichlet boundary, flux on the Neumann boundary) keep their
/// ids but map to system_index -1 with a prescribed value.
///
/// Per-element column order (shared with the element matrices):
///   sigma  : matrix entry c in row-major (00,01,10,11) x modal mode
///   u      : component x/y x modal mode (degree k+j)
///   flux   : local edge x component x edge-Legendre mode (degree k)
///   uhat   : local vertex x component, then local edge x interior node
///            (in edge-parameter order) x component
/// Flux coefficients are stored against the edge's global normal; the
/// per-element sign lives in flux_sign. The uhat edge parameter runs from
/// the lower to the higher global vertex id on both sides of an edge.
struct SpaceLayout {
    int k = 0;
    int j = 0;
    int dim_sigma_mode = 0;  // dim P^k
    int dim_u_mode = 0;      // dim P^{k+j}
    int n_total = 0;
    int n_free = 0;
    int sigma_offset = 0, u_offset = 0, flux_offset = 0, uhat_offset = 0;
    std::vector<int> system_index;       // n_total; -1 where prescribed
    std::vector<double> prescribed_value;  // n_total; 0 on free dofs
    std::vector<std::vector<int>> element_dofs;
    std::vector<std::array<int, 3>> flux_sign;
    std::array<int, 3> test_dims{};  // local (tau, v, q) dimensions

    int columns_per_element() const {
        return 4 * dim_sigma_mode + 2 * dim_u_mode + 12 * k + 12;
    }
    int col_sigma(int comp, int mode) const { return comp * dim_sigma_mode + mode; }
    int col_u(int comp, int mode) const {
        return 4 * dim_sigma_mode + comp * dim_u_mode + mode;
    }
    int col_flux(int local_edge, int comp, int mode) const {
        return 4 * dim_sigma_mode + 2 * dim_u_mode + local_edge * 2 * (k + 1) +
               comp * (k + 1) + mode;
    }
    int col_uhat_vertex(int local_vertex, int comp) const {
        return 4 * dim_sigma_mode + 2 * dim_u_mode + 6 * (k + 1) +
               2 * local_vertex + comp;
    }
    // node = 1..k indexes the edge-interior Lobatto nodes.
    int col_uhat_edge(int local_edge, int node, int comp) const {
        return 4 * dim_sigma_mode + 2 * dim_u_mode + 6 * (k + 1) + 6 +
               local_edge * 2 * k + (node - 1) * 2 + comp;
    }
};

SpaceLayout build_layout(const Mesh& m, int k, int j);

/// Overwrites the prescribed uhat values by nodal interpolation of g on the
/// Dirichlet part of the boundary; g == nullptr means homogeneous data.
void apply_dirichlet(const Mesh& m,
                     const std::function<Eigen::Vector2d(Point2)>& g,
                     SpaceLayout& layout);

/// Elementwise L² projection onto P^k: row t holds the modal coefficients of
/// the projection on element t (in the reference-orthonormal basis).
Eigen::MatrixXd l2_project(const std::function<double(Point2)>& f, int k,
                           const Mesh& m);

}  // namespace elastodpg
