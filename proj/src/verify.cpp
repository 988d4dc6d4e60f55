#include "respde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace respde {

EnergyReport energy_identity(const Problem& p, const Trajectory& traj,
                             const ReflectionMeasure& nu) {
    const Mesh1D& mesh = p.mesh;
    const std::size_t n = mesh.n_interior;
    const std::size_t K = traj.states.empty() ? 0 : traj.states.size() - 1;
    if (nu.masses.size() != K || traj.increments.size() != K)
        throw std::invalid_argument("energy_identity: trajectory/measure shape mismatch");

    EnergyReport rep;
    rep.initial_energy = norm2_h(mesh, traj.states[0]);
    double energy_sum = 0.0;

    for (std::size_t k = 0; k < K; ++k) {
        const Field& u = traj.states[k];
        const double t = traj.times[k];
        const double dt = traj.dt;
        const EdgeField grad = apply_gradient(mesh, u);

        energy_sum += dirichlet_energy(p.op, u) * dt;

        EdgeField g_edge(n + 1);
        for (std::size_t e = 0; e <= n; ++e) {
            const double x = (static_cast<double>(e) + 0.5) * mesh.h;
            const double y_left = (e > 0) ? u[e - 1] : 0.0;
            const double y_right = (e < n) ? u[e] : 0.0;
            g_edge[e] = p.coeffs.g(t, x, 0.5 * (y_left + y_right), grad[e]);
        }
        rep.g_pairing += 2.0 * edge_dot_h(mesh, grad, g_edge) * dt;

        double f_dot = 0.0;
        Field h_factor(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = mesh.node_coords[i];
            const double z = 0.5 * (grad[i] + grad[i + 1]);
            f_dot += u[i] * p.coeffs.f(t, x, u[i], z) * mesh.h;
            h_factor[i] = p.coeffs.h_tilde(t, x, u[i], z);
        }
        rep.f_pairing += 2.0 * f_dot * dt;

        for (std::size_t j = 0; j < p.noise.channels; ++j) {
            const double sq = std::sqrt(p.noise.eigenvalues[j]);
            double hj_norm2 = 0.0, hj_dot_u = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double hij = sq * h_factor[i] * p.noise.eigenfunctions[j][i];
                hj_norm2 += hij * hij * mesh.h;
                hj_dot_u += u[i] * hij * mesh.h;
            }
            rep.h_quadratic += hj_norm2 * dt;
            rep.stochastic += 2.0 * hj_dot_u * traj.increments[k][j];
        }

        for (std::size_t i = 0; i < n; ++i)
            rep.measure_pairing += 2.0 * traj.states[k + 1][i] * nu.masses[k][i];
    }

    rep.lhs = norm2_h(mesh, traj.states[K]) + 2.0 * energy_sum;
    rep.residual = rep.lhs - rep.initial_energy - rep.f_pairing + rep.g_pairing -
                   rep.h_quadratic - rep.stochastic - rep.measure_pairing;
    return rep;
}

Trajectory projected_reference(const Mesh1D& mesh, const EllipticOperator& op,
                               const Obstacle& obs, const Field& xi,
                               const SolverConfig& cfg) {
    const std::size_t n = mesh.n_interior;
    if (xi.size() != n) throw std::invalid_argument("projected_reference: initial size mismatch");
    const auto K = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    if (!(cfg.dt > 0.0) || K == 0 ||
        std::abs(static_cast<double>(K) * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw std::invalid_argument("projected_reference: t_final must be a multiple of dt");

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.penalty_n = 0.0;
    traj.times.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) traj.times[k] = static_cast<double>(k) * cfg.dt;
    traj.states.reserve(K + 1);
    traj.states.push_back(xi);
    for (std::size_t k = 0; k < K; ++k) {
        Field u = solve_shifted(op, cfg.dt, traj.states.back());
        Field pen(n, 0.0);
        double vsq = 0.0;
        if (obs.value) {
            const double t_next = traj.times[k + 1];
            for (std::size_t i = 0; i < n; ++i) {
                const double s = obs.value(t_next, mesh.node_coords[i]);
                if (u[i] < s) {
                    pen[i] = s - u[i];
                    vsq += pen[i] * pen[i] * mesh.h;
                    u[i] = s;
                }
            }
        }
        traj.violation_sq.push_back(vsq);
        traj.penalty_increments.push_back(std::move(pen));
        traj.increments.emplace_back();  // no noise by construction
        traj.states.push_back(std::move(u));
    }
    return traj;
}

namespace {

// Sample lattice for the drift-ordering and shared-coefficient checks.
struct Lattice {
    std::vector<double> ts, xs, ys, zs;
};

Lattice make_lattice(const Mesh1D& mesh, const SolverConfig& cfg) {
    Lattice lat;
    for (int k = 0; k <= 4; ++k) lat.ts.push_back(cfg.t_final * static_cast<double>(k) / 4.0);
    lat.xs = mesh.node_coords;
    for (int k = -3; k <= 3; ++k) {
        lat.ys.push_back(static_cast<double>(k));
        lat.zs.push_back(static_cast<double>(k));
    }
    return lat;
}

Trajectory run_one(const Problem& p, const SolverConfig& cfg, const IncrementProvider* inc,
                   std::uint64_t path) {
    return inc ? simulate_path(p, cfg, *inc, path) : deterministic_penalized(p, cfg);
}

}  // namespace

void check_order_hypotheses(const Problem& lo, const Problem& hi, const SolverConfig& cfg) {
    const Mesh1D& mesh = lo.mesh;
    const double tol = 1e-12;
    if (hi.mesh.n_interior != mesh.n_interior)
        throw std::invalid_argument("comparison: mesh mismatch");

    for (std::size_t i = 0; i < mesh.n_interior; ++i)
        if (lo.xi[i] > hi.xi[i] + tol)
            throw std::invalid_argument("comparison: initial ordering fails at node " +
                                        std::to_string(i));

    if (lo.obstacle.value && !hi.obstacle.value)
        throw std::invalid_argument("comparison: barrier ordering cannot hold (upper unconstrained only below)");
    if (lo.obstacle.value && hi.obstacle.value) {
        const auto K = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
        for (std::size_t k = 0; k <= K; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            for (std::size_t i = 0; i < mesh.n_interior; ++i)
                if (lo.obstacle.value(t, mesh.node_coords[i]) >
                    hi.obstacle.value(t, mesh.node_coords[i]) + tol)
                    throw std::invalid_argument("comparison: barrier ordering fails at node " +
                                                std::to_string(i));
        }
    }

    const Lattice lat = make_lattice(mesh, cfg);
    for (double t : lat.ts)
        for (double x : lat.xs)
            for (double y : lat.ys)
                for (double z : lat.zs) {
                    if (lo.coeffs.f(t, x, y, z) > hi.coeffs.f(t, x, y, z) + tol)
                        throw std::invalid_argument("comparison: drift ordering fails on the sample lattice");
                    if (std::abs(lo.coeffs.g(t, x, y, z) - hi.coeffs.g(t, x, y, z)) > tol ||
                        std::abs(lo.coeffs.h_tilde(t, x, y, z) - hi.coeffs.h_tilde(t, x, y, z)) > tol)
                        throw std::invalid_argument("comparison: g and h coefficients must coincide");
                }
}

ComparisonReport compare_solutions(const Problem& lo, const Problem& hi,
                                   const SolverConfig& cfg, const IncrementProvider* inc,
                                   std::size_t paths) {
    check_order_hypotheses(lo, hi, cfg);
    const std::size_t runs = inc ? std::max<std::size_t>(paths, 1) : 1;
    ComparisonReport rep;
    rep.paths = runs;
    for (std::size_t path = 0; path < runs; ++path) {
        const Trajectory a = run_one(lo, cfg, inc, path);
        const Trajectory b = run_one(hi, cfg, inc, path);
        for (std::size_t k = 0; k < a.states.size(); ++k)
            for (std::size_t i = 0; i < lo.mesh.n_interior; ++i) {
                const double excess = a.states[k][i] - b.states[k][i];
                if (excess > rep.max_violation) rep.max_violation = excess;
            }
    }
    return rep;
}

std::vector<TestFunction> dyadic_dictionary(double t_final, std::size_t levels) {
    if (!(t_final > 0.0)) throw std::invalid_argument("dyadic_dictionary: t_final must be positive");
    std::vector<TestFunction> dict;
    for (std::size_t lvl = 0; lvl < levels; ++lvl) {
        const std::size_t parts = std::size_t{1} << lvl;
        for (std::size_t bt = 0; bt < parts; ++bt)
            for (std::size_t bx = 0; bx < parts; ++bx) {
                const double t0 = t_final * static_cast<double>(bt) / static_cast<double>(parts);
                const double t1 = t_final * static_cast<double>(bt + 1) / static_cast<double>(parts);
                const double x0 = static_cast<double>(bx) / static_cast<double>(parts);
                const double x1 = static_cast<double>(bx + 1) / static_cast<double>(parts);
                TestFunction tf;
                tf.label = "block_l" + std::to_string(lvl) + "_t" + std::to_string(bt) + "_x" +
                           std::to_string(bx);
                tf.phi = [t0, t1, x0, x1](double t, double x) {
                    return (t >= t0 && t < t1 && x >= x0 && x < x1) ? 1.0 : 0.0;
                };
                dict.push_back(std::move(tf));
            }
    }
    return dict;
}

ComparisonReport compare_measures(const Problem& lo, const Problem& hi,
                                  const SolverConfig& cfg, const IncrementProvider* inc,
                                  std::size_t paths) {
    check_order_hypotheses(lo, hi, cfg);
    // The measure ordering additionally needs one shared barrier.
    if (static_cast<bool>(lo.obstacle.value) != static_cast<bool>(hi.obstacle.value))
        throw std::invalid_argument("measure comparison: barriers must be shared");
    if (lo.obstacle.value) {
        const auto K = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
        for (std::size_t k = 0; k <= K; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            for (std::size_t i = 0; i < lo.mesh.n_interior; ++i)
                if (std::abs(lo.obstacle.value(t, lo.mesh.node_coords[i]) -
                             hi.obstacle.value(t, lo.mesh.node_coords[i])) > 1e-12)
                    throw std::invalid_argument("measure comparison: barriers must be shared");
        }
    }

    const auto dict = dyadic_dictionary(cfg.t_final, 3);
    const std::size_t runs = inc ? std::max<std::size_t>(paths, 1) : 1;
    ComparisonReport rep;
    rep.paths = runs;
    bool first = true;
    for (std::size_t path = 0; path < runs; ++path) {
        const Trajectory a = run_one(lo, cfg, inc, path);
        const Trajectory b = run_one(hi, cfg, inc, path);
        for (std::size_t k = 0; k < a.states.size(); ++k)
            for (std::size_t i = 0; i < lo.mesh.n_interior; ++i) {
                const double excess = a.states[k][i] - b.states[k][i];
                if (excess > rep.max_violation) rep.max_violation = excess;
            }
        const ReflectionMeasure nu_lo = extract_measure(lo.mesh, a);
        const ReflectionMeasure nu_hi = extract_measure(hi.mesh, b);
        for (const auto& tf : dict) {
            const double gap = pair_measure(nu_lo, tf.phi) - pair_measure(nu_hi, tf.phi);
            if (first || gap < rep.measure_gap) {
                rep.measure_gap = gap;
                rep.worst_function = tf.label;
                first = false;
            }
        }
    }
    return rep;
}

AprioriTable apriori_bounds(const Problem& p, const SolverConfig& cfg,
                            const PenaltySchedule& schedule, const IncrementProvider* inc,
                            std::size_t paths) {
    AprioriTable table;
    const std::size_t runs = inc ? std::max<std::size_t>(paths, 1) : 1;
    for (double level : schedule.n_values) {
        SolverConfig level_cfg = cfg;
        level_cfg.penalty_n = level;
        AprioriRow row;
        row.penalty_n = level;
        for (std::size_t path = 0; path < runs; ++path) {
            const Trajectory traj = run_one(p, level_cfg, inc, path);
            double sup = 0.0, energy = 0.0, violation = 0.0;
            for (const Field& u : traj.states) sup = std::max(sup, norm2_h(p.mesh, u));
            const std::size_t K = traj.states.size() - 1;
            for (std::size_t k = 0; k < K; ++k)
                energy += dirichlet_energy(p.op, traj.states[k]) * cfg.dt;
            for (double v : traj.violation_sq) violation += v * cfg.dt;
            row.sup_state_norm2 += sup;
            row.energy_integral += energy;
            row.scaled_violation += level * violation;
        }
        const auto norm = static_cast<double>(runs);
        row.sup_state_norm2 /= norm;
        row.energy_integral /= norm;
        row.scaled_violation /= norm;
        table.rows.push_back(row);
    }
    if (table.rows.size() > 1) {
        const AprioriRow& a = table.rows.front();
        const AprioriRow& b = table.rows.back();
        auto grew = [](double first, double last) { return last > 2.0 * first + 1e-300; };
        table.growth_flag = grew(a.sup_state_norm2, b.sup_state_norm2) ||
                            grew(a.energy_integral, b.energy_integral) ||
                            grew(a.scaled_violation, b.scaled_violation);
    }
    return table;
}

}  // namespace respde
