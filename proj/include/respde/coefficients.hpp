#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace respde {

// Scalar coefficient of (t, x, y, z) where y is the solution value and z
// its spatial gradient at the evaluation point.
using CoefficientFn = std::function<double(double, double, double, double)>;

// Nonlinear coefficients of the equation together with their declared
// Lipschitz structure: |f(y,z)-f(y',z')| <= C(|y-y'|+|z-z'|),
// |g(y,z)-g(y',z')| <= C|y-y'| + alpha|z-z'|,
// |h_tilde(y,z)-h_tilde(y',z')| <= C|y-y'| + beta|z-z'|.
// h_tilde is the scalar factor expanded over noise channels as
// sqrt(lambda_i) h_tilde e_i(x).
struct CoefficientSet {
    std::string name = "custom";
    CoefficientFn f;
    CoefficientFn g;
    CoefficientFn h_tilde;
    double C_lip = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

struct ContractionCheck {
    bool ok = false;
    double margin = 0.0;  // 2*lambda_ell - 2*alpha - beta^2
};

// Strict inequality 2*alpha + beta^2 < 2*lambda_ell.
ContractionCheck check_contraction(double alpha, double beta, double lambda_ell);

struct AssumptionReport {
    bool contraction_ok = false;
    double contraction_margin = 0.0;
    double empirical_C = 0.0;      // max sampled quotient over f plus y-quotients of g, h
    double empirical_alpha = 0.0;  // max sampled z-quotient of g
    double empirical_beta = 0.0;   // max sampled z-quotient of h_tilde
    bool within_declared = false;  // empirical <= declared + 1e-9
    bool integrability_ok = false; // f0, g0, h0 finite on the sample grid
};

// Samples difference quotients of f, g, h_tilde at random (t, x, y, z)
// pairs and compares against the declared constants.
AssumptionReport empirical_lipschitz(const CoefficientSet& coeffs,
                                     std::size_t sample_count, std::uint64_t seed,
                                     double lambda_ell);

// Built-in presets. The declared constants are exact for each closed form.
CoefficientSet make_zero_coefficients();
// f = C*y + f_const, g = 0, h_tilde = h_const (additive noise).
CoefficientSet make_linear_coefficients(double C, double f_const, double h_const);
// f = C*tanh(y) + f_const, g = alpha*tanh(z), h_tilde = beta*tanh(z) + h_const.
CoefficientSet make_saturating_coefficients(double C, double alpha, double beta,
                                            double f_const, double h_const);

}  // namespace respde
