#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "respde/solver.hpp"
#include "respde/stepper.hpp"

namespace respde {

// Terms of the discrete quadratic energy identity. Each term is stored with
// its natural (positive-pairing) value; the residual applies the signs
//   residual = lhs - initial_energy - f_pairing + g_pairing
//            - h_quadratic - stochastic - measure_pairing.
struct EnergyReport {
    double lhs = 0.0;              // ||u_T||^2 + 2 sum_k E(u_k) dt
    double initial_energy = 0.0;   // ||u_0||^2
    double f_pairing = 0.0;        // 2 sum_k (u_k, f_k) dt
    double g_pairing = 0.0;        // 2 sum_k (grad_h u_k, g_k) dt
    double h_quadratic = 0.0;      // sum_k sum_j ||h_{j,k}||^2 dt
    double stochastic = 0.0;       // 2 sum_k sum_j (u_k, h_{j,k}) dB^j_k
    double measure_pairing = 0.0;  // 2 sum_{k,i} u_{k+1,i} masses[k][i]
    double residual = 0.0;
};

// Evaluates the identity along a recorded trajectory with the coefficients
// and noise of the originating problem; the stochastic term reuses the
// stored increments, so the residual isolates discretization error.
EnergyReport energy_identity(const Problem& p, const Trajectory& traj,
                             const ReflectionMeasure& nu);

// Independent reference for the deterministic obstacle problem: implicit
// Euler heat step, then nodewise projection onto {u >= S(t+dt)}. This is
// the limit of the exponential penalty substep as its intensity diverges.
Trajectory projected_reference(const Mesh1D& mesh, const EllipticOperator& op,
                               const Obstacle& obs, const Field& xi,
                               const SolverConfig& cfg);

struct ComparisonReport {
    double max_violation = 0.0;  // max over paths/steps/nodes of (u - u')^+
    double measure_gap = 0.0;    // min over dictionary of integral of phi d(nu - nu')
    std::size_t paths = 0;
    std::string worst_function;  // dictionary label attaining measure_gap
};

// Checks the ordering hypotheses (initial data, drift, barrier) on sampled
// grids and throws with the offending location when one fails. g and
// h_tilde must coincide between the two problems.
void check_order_hypotheses(const Problem& lo, const Problem& hi, const SolverConfig& cfg);

// Runs both problems on identical noise (null provider = deterministic) and
// reports the worst pointwise order violation (u_lo - u_hi)^+.
ComparisonReport compare_solutions(const Problem& lo, const Problem& hi,
                                   const SolverConfig& cfg, const IncrementProvider* inc,
                                   std::size_t paths);

struct TestFunction {
    std::string label;
    std::function<double(double, double)> phi;  // (t, x) >= 0
};

// Indicator blocks over dyadic space-time rectangles, levels 0..levels-1
// (4^l blocks per level); level 0 is the constant 1.
std::vector<TestFunction> dyadic_dictionary(double t_final, std::size_t levels);

// Same hypotheses plus a shared barrier; reports the minimum dictionary gap
// integral of phi d(nu_lo - nu_hi), which the ordering predicts >= 0.
ComparisonReport compare_measures(const Problem& lo, const Problem& hi,
                                  const SolverConfig& cfg, const IncrementProvider* inc,
                                  std::size_t paths);

struct AprioriRow {
    double penalty_n = 0.0;
    double sup_state_norm2 = 0.0;   // mean over paths of sup_k ||u_k||^2
    double energy_integral = 0.0;   // mean of sum_k E(u_k) dt
    double scaled_violation = 0.0;  // mean of n * sum_k ||(u*-S)^-||^2 dt
};

struct AprioriTable {
    std::vector<AprioriRow> rows;
    bool growth_flag = false;  // a column grew by more than 2x from first to last level
};

// Uniform-bound tracking across the penalty schedule with shared noise.
AprioriTable apriori_bounds(const Problem& p, const SolverConfig& cfg,
                            const PenaltySchedule& schedule, const IncrementProvider* inc,
                            std::size_t paths);

}  // namespace respde
