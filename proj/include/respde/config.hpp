#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "respde/solver.hpp"

namespace respde {

// Experiment description as read from a plain-text key-value file. Every
// field has a documented default; unknown or duplicate keys are rejected.
struct ExperimentConfig {
    // discretization
    std::uint64_t mesh_n = 200;  // interior nodes
    double dt = 1e-3;
    double t_final = 0.5;
    double a_const = 1.0;  // constant diffusion coefficient

    // noise spectrum; noise_channels = 0 means a deterministic run
    std::string noise_rule = "geometric";  // geometric | polynomial
    double noise_param = 0.5;              // ratio r or exponent p
    std::uint64_t noise_channels = 0;

    // coefficients
    std::string coeff_preset = "zero";  // zero | linear | saturating
    double coeff_c = 0.0;
    double coeff_alpha = 0.0;
    double coeff_beta = 0.0;
    double coeff_f_const = 0.0;
    double coeff_h_const = 0.0;

    // initial state: amplitude * sin(pi x) + shift (preset sine), or shift (zero)
    std::string xi_preset = "sine";
    double xi_amplitude = 1.0;
    double xi_shift = 0.0;

    // barrier: none, or amplitude * sin(pi x) * exp(-decay t)
    std::string obstacle_preset = "sine";
    double obstacle_amplitude = 0.25;
    double obstacle_decay = 0.0;

    // penalty schedule, strictly increasing; the last entry is the working level
    std::vector<double> penalty_schedule = {10.0, 100.0, 1000.0, 10000.0};

    std::string solver = "penalized";  // penalized | picard
    double picard_tol = 1e-6;
    std::uint64_t picard_max_iter = 15;

    std::uint64_t paths = 1;
    std::uint64_t seed = 1;

    // comparison experiment: the upper problem is this one shifted by
    // f + f_shift, xi + xi_shift, S + s_shift
    double compare_f_shift = 0.5;
    double compare_xi_shift = 0.0;
    double compare_s_shift = 0.0;
    double compare_tol = 1e-8;

    std::string out_dir;  // empty: environment default, else "out"
    bool emit_plots = false;

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses "key = value" lines ('#' comments, blank lines allowed). Throws
// std::invalid_argument naming the offending key on unknown keys,
// duplicates, or malformed values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Emits every key in a fixed order with round-trip-exact number formatting,
// so parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// Range and cross-field validation beyond per-key parsing; throws naming
// the field.
void validate_config(const ExperimentConfig& cfg);

// Builders for the solver-facing objects.
Problem build_problem(const ExperimentConfig& cfg);
SolverConfig build_solver_config(const ExperimentConfig& cfg);
PenaltySchedule build_schedule(const ExperimentConfig& cfg);

// Output directory resolution: explicit config value, else the
// RESPDE_OUT_DIR environment variable, else "out".
std::string resolve_out_dir(const ExperimentConfig& cfg);

// Shortest decimal form that parses back to the same double; used by the
// config serializer and all tabular writers.
std::string round_trip_format(double v);

}  // namespace respde
