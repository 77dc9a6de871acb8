#pragma once

#include <vector>

#include "singrad/grid.hpp"
#include "singrad/params.hpp"

namespace singrad {

/// Singular ball profile u_t(r) = integral_r^1 (beta*y + t*y^alpha)^(-1/(p-1)) dy.
/// Ball regime, t >= 0, 0 < r <= 1; adaptive quadrature, relative error <= 1e-10.
double u_ball(const Params& params, double t, double r);

/// u_t'(r) = -(beta*r + t*r^alpha)^(-1/(p-1)), closed form.
double du_ball(const Params& params, double t, double r);

/// u_t''(r) = (1/(p-1)) (beta + t*alpha*r^(alpha-1)) (beta*r + t*r^alpha)^(-p/(p-1)).
double d2u_ball(const Params& params, double t, double r);

/// Kernel element psi_t(r) = (1/(p-1)) integral_r^1 y^alpha (beta*y+t*y^alpha)^(-p/(p-1)) dy,
/// the t-derivative -d/dt u_t. Ball regime, t > 0.
double psi_t(const Params& params, double t, double r);

/// Bounded exterior profile u_t(r) = integral_1^r (t*y^alpha - beta*y)^(-1/(p-1)) dy.
/// Exterior regime, r >= 1. Requires t >= 2*beta unless allow_near_beta, which
/// admits any t > beta and prints a warning (integrand grows as t approaches beta).
double u_exterior(const Params& params, double t, double r, bool allow_near_beta = false);

/// u_t'(r) = (t*r^alpha - beta*r)^(-1/(p-1)), closed form.
double du_exterior(const Params& params, double t, double r, bool allow_near_beta = false);

/// u_t''(r) = -(1/(p-1)) (t*alpha*r^(alpha-1) - beta) (t*r^alpha - beta*r)^(-p/(p-1)).
double d2u_exterior(const Params& params, double t, double r, bool allow_near_beta = false);

/// Pointwise -Laplacian(u_t) - |grad u_t|^p with analytic derivatives; zero up
/// to roundoff for the exact profiles. Works in both regimes.
double profile_residual(const Params& params, double t, double r);

/// Radius where t*R^(alpha-1) = 1, the anchor of the explicit k=0 solve.
double threshold_radius(const Params& params, double t);

/// Radius where the two gradient bound branches cross: beta*r = t*r^alpha.
double branch_crossover_radius(const Params& params, double t);

/// Pointwise verification of the two-branch gradient bound
/// |u_t'(r)| <= min{ C_beta r^(-1/(p-1)), t^(-1/(p-1)) r^(-(N-1)) } on a grid.
struct AsympReport {
    int violations = 0;           // nodes where a branch is exceeded beyond 1e-12 relative
    double max_violation_rel = 0.0;
    double max_slack_rel = 0.0;   // largest relative margin by which the min-bound holds
    double crossover_radius = 0.0;
    double sup_weighted_du = 0.0; // sup_r r^(sigma+1)|u_t'(r)|, must stay <= C_beta
    bool passed = false;
};

AsympReport asymp_check(const Params& params, double t, const RadialGrid& grid);

enum class ProfileKind { BallSolution, ExteriorSolution, KernelPsi };

/// Closed family handle used by the CLI to tabulate (r, u, u', r^(sigma+1)u').
struct RadialProfile {
    Params params;
    double t;
    ProfileKind kind;

    double value(double r) const;
    double derivative(double r) const; // 0 for KernelPsi (not tabulated)
};

} // namespace singrad
