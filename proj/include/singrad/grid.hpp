#pragma once

#include <cstddef>
#include <vector>

namespace singrad {

/// Log-uniform radial grid with trapezoid quadrature weights taken in
/// log-coordinates, so sum(w_i / r_i) = ln(r_max/r_min) exactly.
struct RadialGrid {
    std::vector<double> r;            // strictly increasing nodes, endpoints included
    std::vector<double> quad_weights; // integrate f dr as sum(w_i * f(r_i))
    double r_min = 0.0;
    double r_max = 0.0;
    double dlog = 0.0;                // constant ln r_{i+1} - ln r_i

    std::size_t size() const { return r.size(); }
};

/// M log-uniform nodes on [r_min, r_max]. M >= 2 here; solvers impose their
/// own larger minimums at entry.
RadialGrid make_log_grid(double r_min, double r_max, int M);

/// d/d(ln r) of a nodal profile: 4th-order centered stencil in the interior,
/// one-sided 4th-order at the two nodes nearest each end. Needs M >= 6.
std::vector<double> log_derivative(const RadialGrid& grid, const std::vector<double>& a);

/// d2/d(ln r)^2 with the same order and boundary treatment.
std::vector<double> log_second_derivative(const RadialGrid& grid, const std::vector<double>& a);

/// a'(r_i) from the log-derivative: a' = (dA/ds)/r at s = ln r.
std::vector<double> radial_derivative(const RadialGrid& grid, const std::vector<double>& a);

/// a''(r_i) = (A_ss - A_s)/r^2.
std::vector<double> radial_second_derivative(const RadialGrid& grid, const std::vector<double>& a);

/// Mode Laplacian a'' + (N-1)a'/r - lambda*a/r^2 evaluated nodewise with the
/// high-order stencils; the verification operator used by residual checks.
std::vector<double> mode_laplacian(const RadialGrid& grid, const std::vector<double>& a, int N,
                                   double lambda);

/// Cubic (4-point Lagrange) interpolation in ln r of nodal values at radius r.
/// r must lie within [r_min, r_max].
double interpolate(const RadialGrid& grid, const std::vector<double>& a, double r);

} // namespace singrad
