#include "respde/coefficients.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace respde {

ContractionCheck check_contraction(double alpha, double beta, double lambda_ell) {
    ContractionCheck out;
    out.margin = 2.0 * lambda_ell - 2.0 * alpha - beta * beta;
    out.ok = (2.0 * alpha + beta * beta < 2.0 * lambda_ell);
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [lo, hi) from a counter; pure in (seed, counter).
double uniform_at(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(counter));
    double u = static_cast<double>(s >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace

AssumptionReport empirical_lipschitz(const CoefficientSet& coeffs,
                                     std::size_t sample_count, std::uint64_t seed,
                                     double lambda_ell) {
    if (!coeffs.f || !coeffs.g || !coeffs.h_tilde)
        throw std::invalid_argument("empirical_lipschitz: coefficient set incomplete");

    AssumptionReport rep;
    const auto chk = check_contraction(coeffs.alpha, coeffs.beta, lambda_ell);
    rep.contraction_ok = chk.ok;
    rep.contraction_margin = chk.margin;

    const double R = 5.0;  // sampling box for state arguments
    std::uint64_t c = 0;
    rep.integrability_ok = true;

    for (std::size_t k = 0; k < sample_count; ++k) {
        const double t = uniform_at(seed, c++, 0.0, 1.0);
        const double x = uniform_at(seed, c++, 0.0, 1.0);
        const double y1 = uniform_at(seed, c++, -R, R);
        const double y2 = uniform_at(seed, c++, -R, R);
        const double z1 = uniform_at(seed, c++, -R, R);
        const double z2 = uniform_at(seed, c++, -R, R);

        const double dy = std::abs(y1 - y2);
        const double dz = std::abs(z1 - z2);

        // f: joint quotient against C(|dy| + |dz|).
        if (dy + dz > 1e-12) {
            const double q = std::abs(coeffs.f(t, x, y1, z1) - coeffs.f(t, x, y2, z2)) / (dy + dz);
            if (q > rep.empirical_C) rep.empirical_C = q;
        }
        // g, h_tilde: separate y- and z-quotients.
        if (dy > 1e-12) {
            const double qg = std::abs(coeffs.g(t, x, y1, z1) - coeffs.g(t, x, y2, z1)) / dy;
            const double qh = std::abs(coeffs.h_tilde(t, x, y1, z1) - coeffs.h_tilde(t, x, y2, z1)) / dy;
            if (qg > rep.empirical_C) rep.empirical_C = qg;
            if (qh > rep.empirical_C) rep.empirical_C = qh;
        }
        if (dz > 1e-12) {
            const double qg = std::abs(coeffs.g(t, x, y1, z1) - coeffs.g(t, x, y1, z2)) / dz;
            const double qh = std::abs(coeffs.h_tilde(t, x, y1, z1) - coeffs.h_tilde(t, x, y1, z2)) / dz;
            if (qg > rep.empirical_alpha) rep.empirical_alpha = qg;
            if (qh > rep.empirical_beta) rep.empirical_beta = qh;
        }

        // Zero-state values must stay finite (square-integrable base terms).
        if (!std::isfinite(coeffs.f(t, x, 0.0, 0.0)) || !std::isfinite(coeffs.g(t, x, 0.0, 0.0)) ||
            !std::isfinite(coeffs.h_tilde(t, x, 0.0, 0.0)))
            rep.integrability_ok = false;
    }

    const double slack = 1e-9;
    rep.within_declared = rep.empirical_C <= coeffs.C_lip + slack &&
                          rep.empirical_alpha <= coeffs.alpha + slack &&
                          rep.empirical_beta <= coeffs.beta + slack;
    return rep;
}

CoefficientSet make_zero_coefficients() {
    CoefficientSet cs;
    cs.name = "zero";
    cs.f = [](double, double, double, double) { return 0.0; };
    cs.g = [](double, double, double, double) { return 0.0; };
    cs.h_tilde = [](double, double, double, double) { return 0.0; };
    cs.C_lip = 0.0;
    cs.alpha = 0.0;
    cs.beta = 0.0;
    return cs;
}

CoefficientSet make_linear_coefficients(double C, double f_const, double h_const) {
    CoefficientSet cs;
    cs.name = "linear";
    cs.f = [C, f_const](double, double, double y, double) { return C * y + f_const; };
    cs.g = [](double, double, double, double) { return 0.0; };
    cs.h_tilde = [h_const](double, double, double, double) { return h_const; };
    cs.C_lip = C;
    cs.alpha = 0.0;
    cs.beta = 0.0;
    return cs;
}

CoefficientSet make_saturating_coefficients(double C, double alpha, double beta,
                                            double f_const, double h_const) {
    CoefficientSet cs;
    cs.name = "saturating";
    cs.f = [C, f_const](double, double, double y, double) { return C * std::tanh(y) + f_const; };
    cs.g = [alpha](double, double, double, double z) { return alpha * std::tanh(z); };
    cs.h_tilde = [beta, h_const](double, double, double, double z) {
        return beta * std::tanh(z) + h_const;
    };
    cs.C_lip = C;
    cs.alpha = alpha;
    cs.beta = beta;
    return cs;
}

}  // namespace respde
