#pragma once

#include "singrad/grid.hpp"
#include "singrad/params.hpp"

namespace singrad {

/// Laplace-Beltrami eigenvalue of degree k on S^(N-1): k(k+N-2).
double lambda_k(int N, int k);

/// Which radial operator's indicial equation the roots solve: the singular
/// drift operator near the origin (drift coefficient p/beta) or the plain
/// Laplacian (no drift).
enum class RadialOperator { L0, Laplace };

/// Roots of gamma^2 + (N-2-p/beta)gamma - lambda_k = 0 (L0) or
/// gamma^2 + (N-2)gamma - lambda_k = 0 (Laplace), increasing order.
struct EulerRoots {
    int k = 0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    RadialOperator op = RadialOperator::L0;
};

EulerRoots euler_roots(const Params& params, int k, RadialOperator op);

/// Coefficients of the log-radius form of the weighted mode equation
/// w_tt + g(tau) w_t + C_k(tau) w = 0 at tau = ln r.
struct TauCoefficients {
    double g = 0.0;
    double c_k = 0.0;
};

TauCoefficients tau_coefficients(const Params& params, double t, int k, double tau);

/// Homogeneous-solution scan of the mode ODE: integrates from both ends and
/// fits local power exponents d ln|a| / d ln r, confirming that the branch
/// picked up by inward integration behaves like r^(gamma_minus) near 0 (hence
/// leaves the weighted space) while the outward-seeded branch stays on
/// r^(gamma_plus).
struct KernelDecayReport {
    double exponent_inward = 0.0;   // fitted near r_min, integrating from r=1
    double exponent_outward = 0.0;  // fitted near r_min, seeded regular at r_min
    double exponent_outer = 0.0;    // fitted near r=1 on the outward integration
    double gamma_plus = 0.0;        // reference roots (L0)
    double gamma_minus = 0.0;
    bool weighted_blowup = true;    // r^sigma |a| grows unboundedly along inward branch
};

KernelDecayReport kernel_decay_diagnostic(const Params& params, double t, int k,
                                          const RadialGrid& grid);

} // namespace singrad
