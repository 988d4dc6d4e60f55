#include "respde/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace respde {

Mesh1D Mesh1D::uniform(std::size_t n_interior) {
    if (n_interior == 0) throw std::invalid_argument("mesh: n_interior must be positive");
    Mesh1D m;
    m.n_interior = n_interior;
    m.h = 1.0 / static_cast<double>(n_interior + 1);
    m.node_coords.resize(n_interior);
    for (std::size_t i = 0; i < n_interior; ++i)
        m.node_coords[i] = static_cast<double>(i + 1) * m.h;
    return m;
}

bool all_finite(const Field& u) {
    for (double v : u)
        if (!std::isfinite(v)) return false;
    return true;
}

EdgeField apply_gradient(const Mesh1D& mesh, const Field& u) {
    const std::size_t n = mesh.n_interior;
    if (u.size() != n) throw std::invalid_argument("gradient: field length mismatch");
    EdgeField g(n + 1);
    const double inv_h = 1.0 / mesh.h;
    g[0] = u[0] * inv_h;  // left boundary value 0
    for (std::size_t e = 1; e < n; ++e) g[e] = (u[e] - u[e - 1]) * inv_h;
    g[n] = -u[n - 1] * inv_h;  // right boundary value 0
    return g;
}

Field apply_divergence(const Mesh1D& mesh, const EdgeField& q) {
    const std::size_t n = mesh.n_interior;
    if (q.size() != n + 1) throw std::invalid_argument("divergence: edge field length mismatch");
    Field d(n);
    const double inv_h = 1.0 / mesh.h;
    for (std::size_t i = 0; i < n; ++i) d[i] = (q[i + 1] - q[i]) * inv_h;
    return d;
}

double dot_h(const Mesh1D& mesh, const Field& a, const Field& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot_h: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * mesh.h;
}

double norm2_h(const Mesh1D& mesh, const Field& a) { return dot_h(mesh, a, a); }

double edge_dot_h(const Mesh1D& mesh, const EdgeField& a, const EdgeField& b) {
    if (a.size() != b.size()) throw std::invalid_argument("edge_dot_h: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * mesh.h;
}

double edge_norm2_h(const Mesh1D& mesh, const EdgeField& a) { return edge_dot_h(mesh, a, a); }

}  // namespace respde
