#pragma once

#include <functional>

#include "respde/mesh.hpp"

namespace respde {

// Divergence-form operator A = -d/dx(a(x) d/dx) discretized on interior
// nodes with the conservative 3-point stencil. Stored as the tridiagonal
// stiffness (symmetric by construction).
struct EllipticOperator {
    Mesh1D mesh;
    std::vector<double> a_values;  // a at the n_interior+1 cell midpoints
    double lambda_ell = 0.0;       // lower ellipticity bound
    double Lambda_ell = 0.0;       // upper ellipticity bound
    std::vector<double> diag;      // (a_{i-1/2} + a_{i+1/2}) / h^2
    std::vector<double> off;       // -a_{i+1/2} / h^2, length n_interior-1
};

// Samples a at cell midpoints and builds the stiffness. Rejects any sample
// outside [lambda_ell, Lambda_ell] or a non-positive lambda_ell.
EllipticOperator assemble_operator(const Mesh1D& mesh,
                                   const std::function<double(double)>& a,
                                   double lambda_ell, double Lambda_ell);

Field apply(const EllipticOperator& op, const Field& u);

// Direct tridiagonal (Thomas) solve of (I + dt*A) u = rhs. dt = 0 returns
// rhs unchanged. Rejects non-finite rhs and negative dt.
Field solve_shifted(const EllipticOperator& op, double dt, const Field& rhs);

// Discrete Dirichlet energy sum_edges a_e * ((u_{e+1}-u_e)/h)^2 * h,
// equal to (u, A u)_h.
double dirichlet_energy(const EllipticOperator& op, const Field& u);

}  // namespace respde
