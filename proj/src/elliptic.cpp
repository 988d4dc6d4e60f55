#include "respde/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace respde {

EllipticOperator assemble_operator(const Mesh1D& mesh,
                                   const std::function<double(double)>& a,
                                   double lambda_ell, double Lambda_ell) {
    if (!(lambda_ell > 0.0)) throw std::invalid_argument("operator: lambda_ell must be > 0");
    if (Lambda_ell < lambda_ell)
        throw std::invalid_argument("operator: Lambda_ell < lambda_ell");
    const std::size_t n = mesh.n_interior;
    EllipticOperator op;
    op.mesh = mesh;
    op.lambda_ell = lambda_ell;
    op.Lambda_ell = Lambda_ell;
    op.a_values.resize(n + 1);
    for (std::size_t e = 0; e <= n; ++e) {
        const double xm = (static_cast<double>(e) + 0.5) * mesh.h;  // cell midpoint
        const double ae = a(xm);
        if (!std::isfinite(ae) || ae < lambda_ell || ae > Lambda_ell)
            throw std::invalid_argument("operator: a(" + std::to_string(xm) +
                                        ") violates ellipticity bounds");
        op.a_values[e] = ae;
    }
    const double inv_h2 = 1.0 / (mesh.h * mesh.h);
    op.diag.resize(n);
    op.off.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i)
        op.diag[i] = (op.a_values[i] + op.a_values[i + 1]) * inv_h2;
    for (std::size_t i = 0; i + 1 < n; ++i) op.off[i] = -op.a_values[i + 1] * inv_h2;
    return op;
}

Field apply(const EllipticOperator& op, const Field& u) {
    const std::size_t n = op.mesh.n_interior;
    if (u.size() != n) throw std::invalid_argument("apply: field length mismatch");
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = op.diag[i] * u[i];
        if (i > 0) v += op.off[i - 1] * u[i - 1];
        if (i + 1 < n) v += op.off[i] * u[i + 1];
        r[i] = v;
    }
    return r;
}

Field solve_shifted(const EllipticOperator& op, double dt, const Field& rhs) {
    const std::size_t n = op.mesh.n_interior;
    if (rhs.size() != n) throw std::invalid_argument("solve_shifted: rhs length mismatch");
    if (!(dt >= 0.0)) throw std::invalid_argument("solve_shifted: dt must be >= 0");
    if (!all_finite(rhs)) throw std::invalid_argument("solve_shifted: non-finite rhs");
    if (dt == 0.0) return rhs;

    // Thomas algorithm on (I + dt*A), which is strictly diagonally dominant.
    std::vector<double> c(n), d(n);
    Field u(n);
    double b0 = 1.0 + dt * op.diag[0];
    c[0] = (n > 1) ? dt * op.off[0] / b0 : 0.0;
    d[0] = rhs[0] / b0;
    for (std::size_t i = 1; i < n; ++i) {
        const double lower = dt * op.off[i - 1];
        const double m = 1.0 + dt * op.diag[i] - lower * c[i - 1];
        c[i] = (i + 1 < n) ? dt * op.off[i] / m : 0.0;
        d[i] = (rhs[i] - lower * d[i - 1]) / m;
    }
    u[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
    return u;
}

double dirichlet_energy(const EllipticOperator& op, const Field& u) {
    const EdgeField g = apply_gradient(op.mesh, u);
    double s = 0.0;
    for (std::size_t e = 0; e < g.size(); ++e) s += op.a_values[e] * g[e] * g[e];
    return s * op.mesh.h;
}

}  // namespace respde
