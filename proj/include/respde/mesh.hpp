#pragma once

#include <cstddef>
#include <vector>

namespace respde {

// Grid function on the interior nodes of (0,1); boundary values are
// implicitly zero (homogeneous Dirichlet).
using Field = std::vector<double>;

// Values on the n_interior+1 cell edges between consecutive nodes,
// including the two boundary edges.
using EdgeField = std::vector<double>;

struct Mesh1D {
    std::size_t n_interior = 0;
    double h = 0.0;                   // 1 / (n_interior + 1)
    std::vector<double> node_coords;  // x_i = (i+1) * h, strictly inside (0,1)

    static Mesh1D uniform(std::size_t n_interior);
};

bool all_finite(const Field& u);

// Forward differences (u_{i+1} - u_i)/h with zero Dirichlet padding.
EdgeField apply_gradient(const Mesh1D& mesh, const Field& u);

// Exact negative adjoint of apply_gradient under the h-weighted inner
// products: (grad u, q)_h = -(u, div q)_h holds to rounding.
Field apply_divergence(const Mesh1D& mesh, const EdgeField& q);

// h-weighted inner products and norms.
double dot_h(const Mesh1D& mesh, const Field& a, const Field& b);
double norm2_h(const Mesh1D& mesh, const Field& a);
double edge_dot_h(const Mesh1D& mesh, const EdgeField& a, const EdgeField& b);
double edge_norm2_h(const Mesh1D& mesh, const EdgeField& a);

}  // namespace respde
