#pragma once

#include <cstdint>
#include <vector>

#include "respde/stepper.hpp"

namespace respde {

struct PenaltySchedule {
    std::vector<double> n_values;  // strictly increasing, all positive

    static PenaltySchedule standard();  // {10, 100, 1000, 10000}
};

// Diagnostics recorded for one penalty level of the schedule.
struct PenaltyLevelStats {
    double penalty_n = 0.0;
    double violation_integral = 0.0;  // sum_k ||(u_star - S(t_{k+1}))^-||_h^2 dt
    double scaled_violation = 0.0;    // penalty_n * violation_integral
    double total_mass = 0.0;
    double skorokhod = 0.0;
    double monotone_gap = 0.0;  // max over grid of (u_prev_level - u_this_level)^+
};

struct ObstacleSolution {
    Trajectory u;          // finest penalty level
    ReflectionMeasure nu;  // extracted from the finest level
    std::vector<PenaltyLevelStats> levels;
    bool monotonicity_fault = false;  // violation integral rose by more than 1e-6
};

// Runs the penalized scheme once per schedule level with one shared noise
// path and collects the level diagnostics. A null provider means the
// deterministic (zero-noise) scheme.
ObstacleSolution solve_linear_obstacle(const Problem& p, const SolverConfig& cfg,
                                       const PenaltySchedule& schedule,
                                       const IncrementProvider* inc,
                                       std::uint64_t path_index);

// Literal grid pairing sum_{k,i} (u(t_k, x_i) - S(t_k, x_i)) * masses[k][i]
// with the state taken at the left endpoint of each step.
double skorokhod_pairing(const Mesh1D& mesh, const Trajectory& u, const Obstacle& obs,
                         const ReflectionMeasure& nu);

// Coefficient tables along one trajectory: f and the h factor at the nodes,
// g at the edges, one row per step, all evaluated at the stored state.
struct FrozenSources {
    double dt = 0.0;
    std::vector<Field> f_nodes;
    std::vector<EdgeField> g_edges;
    std::vector<Field> h_nodes;
};

FrozenSources freeze_sources(const Problem& p, const Trajectory& traj);

// Wraps the tables as a coefficient set that ignores (y, z) and looks up
// (t, x) on the grid, so frozen iterates run through the ordinary stepper.
CoefficientSet make_frozen_coefficients(const Mesh1D& mesh, FrozenSources tables);

struct PicardConstants {
    double epsilon = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double rho = 0.0;        // contraction factor, < 1
    bool degenerate = false; // all Lipschitz constants zero; delta clamped
};

// Halve epsilon from 1 until C*eps + alpha + beta^2(1+eps) < 2*lambda - alpha,
// then halve once more; delta = C(1+eps+2/eps) / (C*eps + alpha + beta^2(1+eps));
// gamma = 1/eps + (2*lambda - alpha) * delta. Throws when the contraction
// condition 2*alpha + beta^2 < 2*lambda fails.
PicardConstants choose_gamma_delta(double C, double alpha, double beta, double lambda_ell);

// Left-endpoint quadrature of integral of e^{-gamma t}(delta ||u_t||^2 +
// ||grad_h u_t||^2) dt with h-weighted spatial norms.
double weighted_norm(const Mesh1D& mesh, const Trajectory& traj, double gamma,
                     double delta);
// Same quadrature applied to the state difference of two trajectories on a
// shared time grid.
double weighted_norm_diff(const Mesh1D& mesh, const Trajectory& a, const Trajectory& b,
                          double gamma, double delta);

struct PicardState {
    std::size_t iteration = 0;  // m, starting at 1
    double delta_m = 0.0;       // mean over paths of ||u^m - u^{m-1}||_{gamma,delta}
    double ratio = 0.0;         // delta_m / delta_{m-1}; 0 for m = 1
};

struct PicardResult {
    ObstacleSolution solution;  // final iterate of path 0
    std::vector<PicardState> history;
    PicardConstants constants;
    bool converged = false;
    std::size_t paths = 0;
};

// Fixed-point iteration: u^0 is the initial state held constant in time;
// each iterate freezes the coefficients along the previous one and re-solves
// the penalized equation with the same noise per path. Stops when the mean
// weighted-norm difference falls below tol or after max_iter iterations.
PicardResult picard_solve(const Problem& p, const SolverConfig& cfg,
                          const IncrementProvider* inc, std::size_t paths, double tol,
                          std::size_t max_iter);

}  // namespace respde
