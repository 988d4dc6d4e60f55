#pragma once

#include <cstdint>
#include <memory>

#include "respde/mesh.hpp"

namespace respde {

// Truncated eigen-expansion of a trace-class spatial covariance
// k(x,y) = sum_i lambda_i e_i(x) e_i(y) with the sine basis on (0,1).
struct NoiseModel {
    std::size_t channels = 0;              // J
    std::vector<double> eigenvalues;       // lambda_i >= 0
    std::vector<Field> eigenfunctions;     // e_i sampled at interior nodes
    std::vector<double> sup_norms;         // ||e_i||_inf from the samples
    double partial_trace = 0.0;            // sum lambda_i
    double weighted_trace = 0.0;           // sum lambda_i ||e_i||_inf^2
    double tail_mass = 0.0;                // sum_{i>J} lambda_i, closed form
};

enum class SpectrumRule { geometric, polynomial };

// e_i(x) = sqrt(2) sin(i pi x); lambda_i = r^i (geometric, 0<r<1) or
// i^-p (polynomial, p>1). Rejects parameters with non-summable trace.
NoiseModel build_sine_spectrum(const Mesh1D& mesh, std::size_t J, SpectrumRule rule,
                               double param);

// Per-channel coefficients (sqrt(lambda_i) * h_tilde * e_i(node))_i.
std::vector<double> channel_coefficients(const NoiseModel& model, double h_tilde_value,
                                         std::size_t node);

// Counter-based Gaussian stream: every draw is a pure function of
// (master seed, path id, step id, channel id), so paths and steps are
// addressable without shared generator state.
struct GaussianStream {
    std::uint64_t master_seed = 0;

    double normal(std::uint64_t path, std::uint64_t step, std::uint64_t channel) const;
};

struct NoiseIncrement {
    std::vector<double> dB;  // one increment per channel, N(0, dt)
    double dt = 0.0;
};

NoiseIncrement sample_increment(const NoiseModel& model, double dt,
                                const GaussianStream& stream, std::uint64_t path,
                                std::uint64_t step);

// Source of per-step increments for a path simulation. Implementations are
// pure functions of (path, step) so reruns are bit-identical.
class IncrementProvider {
  public:
    virtual ~IncrementProvider() = default;
    virtual NoiseIncrement at(std::uint64_t path, std::uint64_t step) const = 0;
    virtual double dt() const = 0;
    virtual std::size_t channels() const = 0;
};

class DirectIncrements final : public IncrementProvider {
  public:
    DirectIncrements(const NoiseModel& model, double dt, std::uint64_t seed)
        : model_(&model), dt_(dt), stream_{seed} {}
    NoiseIncrement at(std::uint64_t path, std::uint64_t step) const override {
        return sample_increment(*model_, dt_, stream_, path, step);
    }
    double dt() const override { return dt_; }
    std::size_t channels() const override { return model_->channels; }

  private:
    const NoiseModel* model_;
    double dt_;
    GaussianStream stream_;
};

// Coarse view of a finer stream: the increment for coarse step k is the sum
// of the fine increments 2k and 2k+1, so runs at dt and dt/2 share one
// Brownian path.
class PairSumIncrements final : public IncrementProvider {
  public:
    explicit PairSumIncrements(DirectIncrements fine) : fine_(std::move(fine)) {}
    NoiseIncrement at(std::uint64_t path, std::uint64_t step) const override;
    double dt() const override { return 2.0 * fine_.dt(); }
    std::size_t channels() const override { return fine_.channels(); }

  private:
    DirectIncrements fine_;
};

}  // namespace respde
