#include "respde/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace respde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1]: never zero, so the log below is safe.
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

}  // namespace

double GaussianStream::normal(std::uint64_t path, std::uint64_t step,
                              std::uint64_t channel) const {
    std::uint64_t s = splitmix64(master_seed ^ 0x8c72f5a3d1e94b07ULL);
    s = splitmix64(s ^ path);
    s = splitmix64(s ^ step);
    s = splitmix64(s ^ channel);
    const std::uint64_t bits1 = s;
    const std::uint64_t bits2 = splitmix64(s ^ 0x5bf0a8b1c396d2efULL);
    const double u1 = to_unit(bits1);
    const double u2 = to_unit(bits2);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

NoiseModel build_sine_spectrum(const Mesh1D& mesh, std::size_t J, SpectrumRule rule,
                               double param) {
    if (J < 1) throw std::invalid_argument("noise: J must be >= 1");
    if (rule == SpectrumRule::geometric && !(param > 0.0 && param < 1.0))
        throw std::invalid_argument("noise: geometric rule requires 0 < r < 1");
    if (rule == SpectrumRule::polynomial && !(param > 1.0))
        throw std::invalid_argument("noise: polynomial rule requires p > 1");

    NoiseModel m;
    m.channels = J;
    m.eigenvalues.resize(J);
    m.eigenfunctions.resize(J);
    m.sup_norms.resize(J);
    for (std::size_t i = 0; i < J; ++i) {
        const double idx = static_cast<double>(i + 1);
        m.eigenvalues[i] = (rule == SpectrumRule::geometric)
                               ? std::pow(param, idx)
                               : std::pow(idx, -param);
        Field e(mesh.n_interior);
        double sup = 0.0;
        for (std::size_t k = 0; k < mesh.n_interior; ++k) {
            e[k] = std::numbers::sqrt2 * std::sin(idx * std::numbers::pi * mesh.node_coords[k]);
            sup = std::max(sup, std::abs(e[k]));
        }
        m.eigenfunctions[i] = std::move(e);
        m.sup_norms[i] = sup;
        m.partial_trace += m.eigenvalues[i];
        m.weighted_trace += m.eigenvalues[i] * sup * sup;
    }
    if (rule == SpectrumRule::geometric) {
        // sum_{i>J} r^i = r^{J+1} / (1-r)
        m.tail_mass = std::pow(param, static_cast<double>(J + 1)) / (1.0 - param);
    } else {
        double tail = std::riemann_zeta(param);
        for (std::size_t i = 1; i <= J; ++i)
            tail -= std::pow(static_cast<double>(i), -param);
        m.tail_mass = std::max(tail, 0.0);
    }
    return m;
}

std::vector<double> channel_coefficients(const NoiseModel& model, double h_tilde_value,
                                         std::size_t node) {
    if (node >= (model.channels ? model.eigenfunctions[0].size() : 0) && model.channels)
        throw std::invalid_argument("channel_coefficients: node out of range");
    std::vector<double> c(model.channels);
    for (std::size_t i = 0; i < model.channels; ++i)
        c[i] = std::sqrt(model.eigenvalues[i]) * h_tilde_value * model.eigenfunctions[i][node];
    return c;
}

NoiseIncrement sample_increment(const NoiseModel& model, double dt,
                                const GaussianStream& stream, std::uint64_t path,
                                std::uint64_t step) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be > 0");
    NoiseIncrement inc;
    inc.dt = dt;
    inc.dB.resize(model.channels);
    const double sd = std::sqrt(dt);
    for (std::size_t j = 0; j < model.channels; ++j)
        inc.dB[j] = sd * stream.normal(path, step, j);
    return inc;
}

NoiseIncrement PairSumIncrements::at(std::uint64_t path, std::uint64_t step) const {
    NoiseIncrement a = fine_.at(path, 2 * step);
    const NoiseIncrement b = fine_.at(path, 2 * step + 1);
    for (std::size_t j = 0; j < a.dB.size(); ++j) a.dB[j] += b.dB[j];
    a.dt = 2.0 * a.dt;
    return a;
}

}  // namespace respde
