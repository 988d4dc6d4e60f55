#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "respde/coefficients.hpp"
#include "respde/elliptic.hpp"
#include "respde/noise.hpp"

namespace respde {

// Lower barrier S(t, x). A null value function means "no constraint".
struct Obstacle {
    std::string name = "none";
    std::function<double(double, double)> value;
};

Obstacle make_no_obstacle();
// S(t, x) = amplitude * sin(pi x) * exp(-decay * t).
Obstacle make_sine_obstacle(double amplitude, double decay);

// Barrier sampled on the interior nodes at time t (zeros when absent).
Field sample_obstacle(const Obstacle& obs, const Mesh1D& mesh, double t);

struct Problem {
    Mesh1D mesh;
    EllipticOperator op;
    NoiseModel noise;
    CoefficientSet coeffs;
    Obstacle obstacle;
    Field xi;  // initial state on the interior nodes
};

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 0.5;
    double penalty_n = 1e4;  // penalty intensity; <= 0 or no obstacle disables it
};

// One recorded path of the penalized scheme on the full time grid.
struct Trajectory {
    double dt = 0.0;
    double penalty_n = 0.0;
    std::vector<double> times;                    // K+1 grid times
    std::vector<Field> states;                    // K+1 nodal states
    std::vector<Field> penalty_increments;        // K corrections u_plus - u_star, >= 0
    std::vector<std::vector<double>> increments;  // K x J Brownian increments consumed
    std::vector<double> violation_sq;             // K: ||(u_star - S(t_{k+1}))^-||_h^2
};

// The barrier's reaction as a discrete space-time measure: weight
// penalty_increment * h at (times[k], coords[i]), binned at the left
// endpoint of the step that produced it.
struct ReflectionMeasure {
    double dt = 0.0;
    std::vector<double> times;   // K left endpoints
    std::vector<double> coords;  // interior node coordinates
    std::vector<Field> masses;   // K x N nonnegative weights

    double total_mass() const;
};

ReflectionMeasure extract_measure(const Mesh1D& mesh, const Trajectory& traj);

// Integral of a test function against the measure.
double pair_measure(const ReflectionMeasure& nu,
                    const std::function<double(double, double)>& phi);

// One splitting step from (t, u): explicit sources and noise collected into
// the right-hand side, implicit diffusion solve, then the exact relaxation
// u_plus = S + (u_star - S) e^{-n dt} wherever u_star < S(t+dt). Non-null
// out-pointers receive the pre-relaxation state and the added correction.
Field step(const Problem& p, const SolverConfig& cfg, const Field& u, double t,
           const std::vector<double>& dB, Field* pre_penalty, Field* penalty_increment);

Trajectory simulate_path(const Problem& p, const SolverConfig& cfg,
                         const IncrementProvider& inc, std::uint64_t path_index);

// Same scheme with every Brownian increment zero.
Trajectory deterministic_penalized(const Problem& p, const SolverConfig& cfg);

}  // namespace respde
