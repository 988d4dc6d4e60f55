#include "respde/solver.hpp"

#include <cmath>
#include <future>
#include <memory>
#include <stdexcept>

namespace respde {

PenaltySchedule PenaltySchedule::standard() { return {{10.0, 100.0, 1000.0, 10000.0}}; }

namespace {

void validate_schedule(const PenaltySchedule& schedule) {
    if (schedule.n_values.empty())
        throw std::invalid_argument("penalty schedule must be nonempty");
    double prev = 0.0;
    for (double n : schedule.n_values) {
        if (!(n > prev))
            throw std::invalid_argument("penalty schedule must be strictly increasing and positive");
        prev = n;
    }
}

std::size_t grid_steps(const SolverConfig& cfg) {
    const auto K = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    if (!(cfg.dt > 0.0) || K == 0 ||
        std::abs(static_cast<double>(K) * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw std::invalid_argument("t_final must be a positive multiple of dt");
    return K;
}

std::size_t clamped_index(double value, double spacing, double shift, std::size_t count) {
    const long long raw = std::llround(value / spacing - shift);
    if (raw <= 0) return 0;
    const auto idx = static_cast<std::size_t>(raw);
    return idx >= count ? count - 1 : idx;
}

}  // namespace

ObstacleSolution solve_linear_obstacle(const Problem& p, const SolverConfig& cfg,
                                       const PenaltySchedule& schedule,
                                       const IncrementProvider* inc,
                                       std::uint64_t path_index) {
    validate_schedule(schedule);
    ObstacleSolution sol;
    Trajectory prev_traj;
    for (std::size_t lvl = 0; lvl < schedule.n_values.size(); ++lvl) {
        SolverConfig level_cfg = cfg;
        level_cfg.penalty_n = schedule.n_values[lvl];
        Trajectory traj = inc ? simulate_path(p, level_cfg, *inc, path_index)
                              : deterministic_penalized(p, level_cfg);

        PenaltyLevelStats stats;
        stats.penalty_n = level_cfg.penalty_n;
        for (double v : traj.violation_sq) stats.violation_integral += v * cfg.dt;
        stats.scaled_violation = level_cfg.penalty_n * stats.violation_integral;
        ReflectionMeasure nu = extract_measure(p.mesh, traj);
        stats.total_mass = nu.total_mass();
        stats.skorokhod = skorokhod_pairing(p.mesh, traj, p.obstacle, nu);
        if (lvl > 0) {
            // Penalized states rise with n; record the worst drop.
            for (std::size_t k = 0; k < traj.states.size(); ++k)
                for (std::size_t i = 0; i < p.mesh.n_interior; ++i) {
                    const double drop = prev_traj.states[k][i] - traj.states[k][i];
                    if (drop > stats.monotone_gap) stats.monotone_gap = drop;
                }
            if (stats.violation_integral > sol.levels.back().violation_integral + 1e-6)
                sol.monotonicity_fault = true;
        }
        sol.levels.push_back(stats);

        if (lvl + 1 == schedule.n_values.size()) {
            sol.nu = std::move(nu);
            sol.u = std::move(traj);
        } else {
            prev_traj = std::move(traj);
        }
    }
    return sol;
}

double skorokhod_pairing(const Mesh1D& mesh, const Trajectory& u, const Obstacle& obs,
                         const ReflectionMeasure& nu) {
    const std::size_t K = nu.masses.size();
    if (u.states.size() != K + 1)
        throw std::invalid_argument("skorokhod_pairing: trajectory/measure step mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (u.states[k].size() != mesh.n_interior || nu.masses[k].size() != mesh.n_interior)
            throw std::invalid_argument("skorokhod_pairing: field size mismatch");
        for (std::size_t i = 0; i < mesh.n_interior; ++i) {
            const double s =
                obs.value ? obs.value(nu.times[k], mesh.node_coords[i]) : 0.0;
            acc += (u.states[k][i] - s) * nu.masses[k][i];
        }
    }
    return acc;
}

FrozenSources freeze_sources(const Problem& p, const Trajectory& traj) {
    const Mesh1D& mesh = p.mesh;
    const std::size_t n = mesh.n_interior;
    const std::size_t K = traj.states.empty() ? 0 : traj.states.size() - 1;
    FrozenSources tab;
    tab.dt = traj.dt;
    tab.f_nodes.resize(K, Field(n));
    tab.h_nodes.resize(K, Field(n));
    tab.g_edges.resize(K, EdgeField(n + 1));
    for (std::size_t k = 0; k < K; ++k) {
        const Field& u = traj.states[k];
        const double t = traj.times[k];
        const EdgeField grad = apply_gradient(mesh, u);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = mesh.node_coords[i];
            const double z = 0.5 * (grad[i] + grad[i + 1]);
            tab.f_nodes[k][i] = p.coeffs.f(t, x, u[i], z);
            tab.h_nodes[k][i] = p.coeffs.h_tilde(t, x, u[i], z);
        }
        for (std::size_t e = 0; e <= n; ++e) {
            const double x = (static_cast<double>(e) + 0.5) * mesh.h;
            const double y_left = (e > 0) ? u[e - 1] : 0.0;
            const double y_right = (e < n) ? u[e] : 0.0;
            tab.g_edges[k][e] = p.coeffs.g(t, x, 0.5 * (y_left + y_right), grad[e]);
        }
    }
    return tab;
}

CoefficientSet make_frozen_coefficients(const Mesh1D& mesh, FrozenSources tables) {
    if (tables.f_nodes.empty())
        throw std::invalid_argument("make_frozen_coefficients: empty tables");
    auto tab = std::make_shared<const FrozenSources>(std::move(tables));
    const double h = mesh.h;
    const std::size_t n = mesh.n_interior;
    const std::size_t K = tab->f_nodes.size();

    CoefficientSet cs;
    cs.name = "frozen";
    // The stepper always evaluates at grid times and node/edge coordinates,
    // so rounding recovers the table indices exactly.
    cs.f = [tab, h, n, K](double t, double x, double, double) {
        return tab->f_nodes[clamped_index(t, tab->dt, 0.0, K)][clamped_index(x, h, 1.0, n)];
    };
    cs.g = [tab, h, n, K](double t, double x, double, double) {
        return tab->g_edges[clamped_index(t, tab->dt, 0.0, K)][clamped_index(x, h, 0.5, n + 1)];
    };
    cs.h_tilde = [tab, h, n, K](double t, double x, double, double) {
        return tab->h_nodes[clamped_index(t, tab->dt, 0.0, K)][clamped_index(x, h, 1.0, n)];
    };
    cs.C_lip = 0.0;
    cs.alpha = 0.0;
    cs.beta = 0.0;
    return cs;
}

PicardConstants choose_gamma_delta(double C, double alpha, double beta, double lambda_ell) {
    if (!check_contraction(alpha, beta, lambda_ell).ok)
        throw std::invalid_argument("choose_gamma_delta: contraction condition fails");
    if (C < 0.0) throw std::invalid_argument("choose_gamma_delta: negative Lipschitz constant");

    const double bound = 2.0 * lambda_ell - alpha;
    double eps = 1.0;
    int guard = 0;
    while (!(C * eps + alpha + beta * beta * (1.0 + eps) < bound)) {
        eps *= 0.5;
        if (++guard > 200)
            throw std::runtime_error("choose_gamma_delta: epsilon search failed to terminate");
    }
    eps *= 0.5;  // safety margin beyond the first admissible value

    PicardConstants pc;
    pc.epsilon = eps;
    const double denom = C * eps + alpha + beta * beta * (1.0 + eps);
    pc.rho = denom > 0.0 ? denom / bound : 0.0;
    double delta = denom > 0.0 ? C * (1.0 + eps + 2.0 / eps) / denom : 0.0;
    if (delta <= 0.0) {
        delta = 1e-12;  // keep the norm positive-definite in the degenerate case
        pc.degenerate = true;
    }
    pc.delta = delta;
    pc.gamma = 1.0 / eps + bound * delta;
    return pc;
}

double weighted_norm(const Mesh1D& mesh, const Trajectory& traj, double gamma,
                     double delta) {
    if (gamma < 0.0 || delta < 0.0)
        throw std::invalid_argument("weighted_norm: gamma and delta must be nonnegative");
    const std::size_t K = traj.states.empty() ? 0 : traj.states.size() - 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double w = std::exp(-gamma * traj.times[k]);
        acc += w *
               (delta * norm2_h(mesh, traj.states[k]) +
                edge_norm2_h(mesh, apply_gradient(mesh, traj.states[k]))) *
               traj.dt;
    }
    return acc;
}

double weighted_norm_diff(const Mesh1D& mesh, const Trajectory& a, const Trajectory& b,
                          double gamma, double delta) {
    if (a.states.size() != b.states.size() || std::abs(a.dt - b.dt) > 1e-15)
        throw std::invalid_argument("weighted_norm_diff: trajectories on different grids");
    const std::size_t K = a.states.empty() ? 0 : a.states.size() - 1;
    double acc = 0.0;
    Field diff(mesh.n_interior);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < mesh.n_interior; ++i)
            diff[i] = a.states[k][i] - b.states[k][i];
        const double w = std::exp(-gamma * a.times[k]);
        acc += w *
               (delta * norm2_h(mesh, diff) + edge_norm2_h(mesh, apply_gradient(mesh, diff))) *
               a.dt;
    }
    return acc;
}

PicardResult picard_solve(const Problem& p, const SolverConfig& cfg,
                          const IncrementProvider* inc, std::size_t paths, double tol,
                          std::size_t max_iter) {
    if (paths == 0) throw std::invalid_argument("picard_solve: need at least one path");
    if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
    if (max_iter == 0) throw std::invalid_argument("picard_solve: max_iter must be positive");

    PicardResult result;
    result.paths = paths;
    result.constants =
        choose_gamma_delta(p.coeffs.C_lip, p.coeffs.alpha, p.coeffs.beta, p.op.lambda_ell);

    const std::size_t K = grid_steps(cfg);
    Trajectory u0;
    u0.dt = cfg.dt;
    u0.penalty_n = cfg.penalty_n;
    u0.times.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) u0.times[k] = static_cast<double>(k) * cfg.dt;
    u0.states.assign(K + 1, p.xi);

    const bool constrained = static_cast<bool>(p.obstacle.value) && cfg.penalty_n > 0.0;
    const PenaltySchedule inner{{constrained ? cfg.penalty_n : 1.0}};

    std::vector<Trajectory> prev(paths, u0);
    std::vector<ObstacleSolution> cur(paths);

    for (std::size_t m = 1; m <= max_iter; ++m) {
        // Paths are independent within one iterate; the frozen tables are
        // read-only snapshots of the previous iterate.
        std::vector<std::future<ObstacleSolution>> jobs;
        jobs.reserve(paths);
        for (std::size_t path = 0; path < paths; ++path)
            jobs.push_back(std::async(std::launch::async, [&, path] {
                Problem fp = p;
                fp.coeffs = make_frozen_coefficients(p.mesh, freeze_sources(p, prev[path]));
                if (!constrained) fp.obstacle = make_no_obstacle();
                return solve_linear_obstacle(fp, cfg, inner, inc, path);
            }));
        for (std::size_t path = 0; path < paths; ++path) cur[path] = jobs[path].get();

        double mean_delta = 0.0;
        for (std::size_t path = 0; path < paths; ++path)
            mean_delta += weighted_norm_diff(p.mesh, cur[path].u, prev[path],
                                             result.constants.gamma, result.constants.delta);
        mean_delta /= static_cast<double>(paths);

        PicardState state;
        state.iteration = m;
        state.delta_m = mean_delta;
        state.ratio = result.history.empty() || result.history.back().delta_m <= 0.0
                          ? 0.0
                          : mean_delta / result.history.back().delta_m;
        result.history.push_back(state);

        for (std::size_t path = 0; path < paths; ++path) prev[path] = cur[path].u;
        if (mean_delta <= tol) {
            result.converged = true;
            break;
        }
    }
    result.solution = std::move(cur.front());
    return result;
}

}  // namespace respde
