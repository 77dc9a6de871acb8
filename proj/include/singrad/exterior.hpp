#pragma once

#include <vector>

#include "singrad/mode_field.hpp"
#include "singrad/params.hpp"

namespace singrad {

/// Cutoff for the exterior ansatz u = eta u_t + phi: identically zero on
/// [1,2], identically one from r = 3 outward, C^2 in between.
double exterior_eta(double r);
double exterior_eta_d1(double r);
double exterior_eta_d2(double r);

/// Ladder of truncation radii for the half-space between the unit sphere and
/// infinity. Each radius is snapped to the nearest node of the data grid, so
/// every level solves on a prefix of the same log-uniform grid.
struct TruncationConfig {
    std::vector<double> R_levels = {50.0, 100.0, 200.0, 400.0, 800.0};
    double stabilization_tol = 1e-8;
    bool require_stabilization = true;
};

struct TruncationReport {
    ModeField phi;                   // solve at the largest level
    std::vector<std::vector<double>> phi_prime; // exact a_k'(r) per slot, no differencing
    std::vector<double> level_radii; // snapped outer radii, one per level
    std::vector<double> level_gaps;  // X-distance between consecutive levels
    int stabilized_at = -1;          // first level within tolerance of its predecessor
    double neumann_sup = 0.0;        // sup_k |a_k'| at the outer edge of the last level
    double norm_ratio = 0.0;         // (X norm + weighted Laplacian of phi) / Y norm of f
};

/// Solves Delta phi = f outside the unit sphere with phi = 0 at r = 1 and
/// zero Neumann data at the truncation radius, mode by mode through the exact
/// two-sided Green representation of the constant-coefficient log-radius
/// form. The data grid must start at r = 1 and end at the largest level.
/// Raises TruncationError when the ladder never stabilizes (if required).
TruncationReport laplace_exterior_solve(const Params& params, const ModeField& f,
                                        const TruncationConfig& config = {});

/// Drift part of the linearization around the explicit exterior profile:
/// p (x . grad phi) / (|x| (t|x|^alpha - beta|x|)). Needs t > beta so the
/// denominator stays positive outside the unit sphere.
ModeField apply_exterior_drift(const Params& params, double t, const ModeField& phi);

struct ExteriorLinearReport {
    ModeField phi;
    std::vector<std::vector<double>> phi_prime; // exact a_k'(r) per slot
    int iterations = 0;
    bool converged = false;
    std::vector<double> step_norms;  // X norms of successive corrections
    std::vector<double> step_ratios;
    double residual = 0.0;           // Y norm of Delta phi + drift - f
    double norm_X = 0.0;
    double norm_Y = 0.0;             // Y norm of the data
};

/// Solves Delta phi + drift(phi) = f by iterating phi <- Delta^{-1}(f - drift),
/// a perturbation series whose ratio shrinks like 1/t. Steps are measured
/// with the solver's exact derivative profiles, and corrections that reach
/// the arithmetic floor of the repeated solves count as converged. Two
/// consecutive non-contracting steps above that floor raise DivergenceError.
ExteriorLinearReport solve_Lt_exterior(const Params& params, double t, const ModeField& f,
                                       const TruncationConfig& trunc = {}, int max_iter = 64,
                                       double tol_X = 1e-12);

struct FarFieldReport {
    std::vector<double> radii;       // sample radii (snapped to grid nodes)
    std::vector<double> values;      // r^(N-1) u'(r) at each sample
    double target = 0.0;             // t^(-1/(p-1))
    double max_rel_deviation = 0.0;
    double crossover_radius = 0.0;   // largest radius where u' <= 0 (1 if none)
    bool monotone_beyond = false;    // u' > 0 at every node past the crossover
};

struct ExteriorConfig {
    double t = 1e2;
    std::vector<double> R_levels = {125.0, 250.0, 500.0, 1000.0, 2000.0};
    int M = 16384;                   // nodes of the master grid [1, R_levels.back()]
    double stabilization_tol = 1e-8;
    int max_iter = 24;
    double tol_X = 1e-9;             // outer fixed-point tolerance
    bool eta_identity = false;       // skip the correction and take u = u_t directly
    std::vector<double> far_field_radii = {10.0, 100.0, 1000.0};
};

struct ExteriorSolveReport {
    ModeField phi;
    int iterations = 0;
    bool converged = false;
    std::vector<double> step_norms;
    double contraction_factor = 0.0; // worst ratio of successive steps
    double norm_X = 0.0;
    double eps_t = 0.0;              // cutoff mismatch size, shrinks with t
    double eps_hat_t = 0.0;          // quadratic-remainder weight, zero for p <= 2
    double residual = 0.0;           // weighted sup of Delta u + |grad u|^p
    double boundary_sup = 0.0;       // |u| at r = 1
    bool positive = false;           // u > 0 at every interior node
    FarFieldReport far_field;
};

/// Builds the bounded solution u = eta u_t + phi of -Delta u = |grad u|^p
/// outside the unit ball with u = 0 on the boundary sphere, by the fixed
/// point of the linearized problem. Radial data keeps every iterate radial.
ExteriorSolveReport solve_exterior_problem(const Params& params, const ExteriorConfig& config = {});

/// Sup over the cutoff collar of the mismatch sourced by eta: the two
/// exchange terms plus the drift discrepancy between u_t and eta u_t.
double exterior_matching_error(const Params& params, double t, int n_samples = 2048);

/// Sup of r^(-sigma) |grad(eta u_t)|^(p-2), the weight multiplying the
/// quadratic remainder when p > 2; identically zero for p <= 2.
double exterior_quadratic_error(const Params& params, double t, int n_samples = 2048);

} // namespace singrad
