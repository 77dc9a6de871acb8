#pragma once

#include "singrad/grid.hpp"
#include "singrad/mode_field.hpp"
#include "singrad/params.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace singrad {

/// Integrating factor of the degree-zero radial operator, normalized so that
/// mu_t(1) = 1. (mu a')' / mu reproduces the drift operator in divergence
/// form.
double mu_t(const Params& params, double t, double r);

/// Wraps nodal values as a radial function: log-cubic interpolation on the
/// grid, and below r_min the weighted-constant extension
/// values.front() * (r_min/r)^(sigma+2).
std::function<double(double)> extend_weighted(std::shared_ptr<const RadialGrid> grid,
                                              std::vector<double> values, double sigma);

struct Mode0Solution {
    double t = 0.0;
    double anchor_radius = 0.0; // the derivative vanishes here
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> a;
    std::vector<double> a_prime;     // quadrature derivative, not a stencil
    double sup_weighted_prime = 0.0; // sup r^(sigma+1) |a'|
};

/// Degree-zero solve with a(1) = 0 and a'(anchor) = 0, by double quadrature
/// of the integrating-factor form. The data b must be callable on
/// (0, 1]. Requires t >= 1 so the anchor lies inside the ball.
Mode0Solution solve_mode0(const Params& params, double t,
                          const std::function<double(double)>& b,
                          std::shared_ptr<const RadialGrid> grid);

/// Bound on sup r^(sigma+1)|a0'| for data with sup r^(sigma+2)|b| <= 1:
/// max of the closed-form inner-region constant ((beta+1)/beta)^(p/(p-1)) /
/// (alpha-1) and twice a constant measured once on the reference
/// configuration N=3, p=7/4.
double mode0_gradient_bound(const Params& params);

/// Degree-k (k >= 1) collocation solve in log radius with a(1) = 0 and the
/// regular-branch condition a'(r_min) = gamma_k^+ a(r_min) / r_min at the
/// inner edge. b holds nodal values of the data.
std::vector<double> solve_modek(const Params& params, double t, int k,
                                const std::vector<double>& b, const RadialGrid& grid);

/// Applies the degree-k radial operator
///   -a'' - (N-1)a'/r + lambda_k a/r^2 + p a'/(beta r + t r^alpha)
/// with the 4th-order log-grid stencils.
std::vector<double> apply_mode_operator(const Params& params, double t, int k,
                                        const RadialGrid& grid,
                                        const std::vector<double>& a);

/// Weighted defect sup r^(sigma+2)|Op(a) - b| over interior nodes (one-sided
/// stencil rows at both ends excluded).
double mode_residual(const Params& params, double t, int k, const RadialGrid& grid,
                     const std::vector<double>& a, const std::vector<double>& b);

struct ModeResidual {
    int index = 0;  // flat harmonic slot
    int degree = 0; // harmonic degree of the slot
    double residual = 0.0;
};

struct LinearSolveReport {
    ModeField phi;
    double norm_X = 0.0;     // of the solution
    double norm_Y = 0.0;     // of the data
    double ratio = 0.0;      // norm_X / norm_Y
    double residual = 0.0;   // worst per-mode weighted defect
    double mode_split = 0.0; // (|f_0|_Y + |f_1|_Y) / |f|_Y
    bool converged = false;
    std::vector<ModeResidual> modes;
};

/// Mode-by-mode solve of the full linearized operator on the ball: the
/// degree-zero slot goes through the quadrature solve, every higher slot
/// through collocation. Requires ball params and t >= 1.
LinearSolveReport solve_Lt(const Params& params, double t, const ModeField& f,
                           double residual_tol = 1e-4);

} // namespace singrad
