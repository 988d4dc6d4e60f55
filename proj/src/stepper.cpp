#include "respde/stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace respde {

Obstacle make_no_obstacle() { return Obstacle{"none", nullptr}; }

Obstacle make_sine_obstacle(double amplitude, double decay) {
    Obstacle obs;
    obs.name = "sine";
    obs.value = [amplitude, decay](double t, double x) {
        return amplitude * std::sin(M_PI * x) * std::exp(-decay * t);
    };
    return obs;
}

Field sample_obstacle(const Obstacle& obs, const Mesh1D& mesh, double t) {
    Field s(mesh.n_interior, 0.0);
    if (obs.value)
        for (std::size_t i = 0; i < mesh.n_interior; ++i)
            s[i] = obs.value(t, mesh.node_coords[i]);
    return s;
}

double ReflectionMeasure::total_mass() const {
    double total = 0.0;
    for (const auto& row : masses)
        for (double m : row) total += m;
    return total;
}

ReflectionMeasure extract_measure(const Mesh1D& mesh, const Trajectory& traj) {
    ReflectionMeasure nu;
    nu.dt = traj.dt;
    nu.coords = mesh.node_coords;
    const std::size_t K = traj.penalty_increments.size();
    nu.times.assign(traj.times.begin(), traj.times.begin() + static_cast<std::ptrdiff_t>(K));
    nu.masses.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        nu.masses[k].resize(mesh.n_interior);
        for (std::size_t i = 0; i < mesh.n_interior; ++i)
            nu.masses[k][i] = traj.penalty_increments[k][i] * mesh.h;
    }
    return nu;
}

double pair_measure(const ReflectionMeasure& nu,
                    const std::function<double(double, double)>& phi) {
    if (!phi) throw std::invalid_argument("pair_measure: null test function");
    double acc = 0.0;
    for (std::size_t k = 0; k < nu.masses.size(); ++k)
        for (std::size_t i = 0; i < nu.coords.size(); ++i)
            acc += phi(nu.times[k], nu.coords[i]) * nu.masses[k][i];
    return acc;
}

Field step(const Problem& p, const SolverConfig& cfg, const Field& u, double t,
           const std::vector<double>& dB, Field* pre_penalty, Field* penalty_increment) {
    const Mesh1D& mesh = p.mesh;
    const std::size_t n = mesh.n_interior;
    if (u.size() != n) throw std::invalid_argument("step: state size mismatch");
    if (dB.size() != p.noise.channels)
        throw std::invalid_argument("step: increment channel count mismatch");
    const double dt = cfg.dt;
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");

    const EdgeField grad = apply_gradient(mesh, u);

    // Explicit sources accumulated into the pre-diffusion right-hand side.
    Field rhs = u;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh.node_coords[i];
        const double z = 0.5 * (grad[i] + grad[i + 1]);  // nodal gradient
        rhs[i] += dt * p.coeffs.f(t, x, u[i], z);

        double noise_sum = 0.0;
        for (std::size_t j = 0; j < p.noise.channels; ++j)
            noise_sum += dB[j] * std::sqrt(p.noise.eigenvalues[j]) * p.noise.eigenfunctions[j][i];
        rhs[i] += p.coeffs.h_tilde(t, x, u[i], z) * noise_sum;
    }

    // g lives on edges (value interpolated, gradient native) so its
    // discrete divergence is adjoint to the gradient used in the energy.
    EdgeField gq(n + 1);
    for (std::size_t e = 0; e <= n; ++e) {
        const double x = (static_cast<double>(e) + 0.5) * mesh.h;
        const double y_left = (e > 0) ? u[e - 1] : 0.0;
        const double y_right = (e < n) ? u[e] : 0.0;
        gq[e] = p.coeffs.g(t, x, 0.5 * (y_left + y_right), grad[e]);
    }
    const Field divg = apply_divergence(mesh, gq);
    for (std::size_t i = 0; i < n; ++i) rhs[i] += dt * divg[i];

    Field u_star = solve_shifted(p.op, dt, rhs);

    if (pre_penalty) *pre_penalty = u_star;

    Field pen(n, 0.0);
    if (p.obstacle.value && cfg.penalty_n > 0.0) {
        const double t_next = t + dt;
        const double relax = std::exp(-cfg.penalty_n * dt);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = p.obstacle.value(t_next, mesh.node_coords[i]);
            if (u_star[i] < s) {
                const double lifted = s + (u_star[i] - s) * relax;
                pen[i] = lifted - u_star[i];
                u_star[i] = lifted;
            }
        }
    }
    if (penalty_increment) *penalty_increment = std::move(pen);
    return u_star;
}

namespace {

std::size_t step_count(const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0))
        throw std::invalid_argument("simulate: dt and t_final must be positive");
    const double ratio = cfg.t_final / cfg.dt;
    const auto K = static_cast<std::size_t>(std::llround(ratio));
    if (K == 0 || std::abs(static_cast<double>(K) * cfg.dt - cfg.t_final) >
                      1e-9 * std::max(1.0, cfg.t_final))
        throw std::invalid_argument("simulate: t_final must be a multiple of dt");
    return K;
}

Trajectory run_path(const Problem& p, const SolverConfig& cfg,
                    const IncrementProvider* inc, std::uint64_t path_index) {
    const std::size_t n = p.mesh.n_interior;
    if (p.xi.size() != n) throw std::invalid_argument("simulate: initial state size mismatch");
    if (inc && std::abs(inc->dt() - cfg.dt) > 1e-12)
        throw std::invalid_argument("simulate: increment provider dt mismatch");
    if (inc && inc->channels() != p.noise.channels)
        throw std::invalid_argument("simulate: increment provider channel mismatch");

    const std::size_t K = step_count(cfg);
    Trajectory traj;
    traj.dt = cfg.dt;
    traj.penalty_n = cfg.penalty_n;
    traj.times.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) traj.times[k] = static_cast<double>(k) * cfg.dt;
    traj.states.reserve(K + 1);
    traj.states.push_back(p.xi);
    traj.penalty_increments.reserve(K);
    traj.increments.reserve(K);
    traj.violation_sq.reserve(K);

    const std::vector<double> zero_dB(p.noise.channels, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> dB = inc ? inc->at(path_index, k).dB : zero_dB;
        Field pre, pen;
        Field next = step(p, cfg, traj.states.back(), traj.times[k], dB, &pre, &pen);
        if (!all_finite(next))
            throw std::runtime_error("simulate: state is not finite at step " + std::to_string(k));

        double vsq = 0.0;
        if (p.obstacle.value) {
            const double t_next = traj.times[k + 1];
            for (std::size_t i = 0; i < n; ++i) {
                const double deficit = p.obstacle.value(t_next, p.mesh.node_coords[i]) - pre[i];
                if (deficit > 0.0) vsq += deficit * deficit * p.mesh.h;
            }
        }
        traj.violation_sq.push_back(vsq);
        traj.penalty_increments.push_back(std::move(pen));
        traj.increments.push_back(std::move(dB));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

}  // namespace

Trajectory simulate_path(const Problem& p, const SolverConfig& cfg,
                         const IncrementProvider& inc, std::uint64_t path_index) {
    return run_path(p, cfg, &inc, path_index);
}

Trajectory deterministic_penalized(const Problem& p, const SolverConfig& cfg) {
    return run_path(p, cfg, nullptr, 0);
}

}  // namespace respde
