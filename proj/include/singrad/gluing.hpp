#pragma once

#include <memory>
#include <vector>

#include "singrad/mode_field.hpp"
#include "singrad/params.hpp"

namespace singrad {

/// C2 monotone transition: 1 for r <= inner, 0 for r >= outer, quintic blend
/// in between. Pre: 0 < inner < outer.
double smooth_cutoff(double inner, double outer, double r);
double smooth_cutoff_d1(double inner, double outer, double r);
double smooth_cutoff_d2(double inner, double outer, double r);

/// Matched pair of radial cutoffs: zeta drops 1 -> 0 across [s0, 2 s0], eta
/// across [2 s0, 4 s0]. eta == 1 on supp(zeta), so zeta * eta == zeta
/// everywhere. An identity pair is constant 1 (localization disabled); s0 is
/// then only the bookkeeping split between near-origin and outer regions.
struct CutoffPair {
    double s0 = 0.02;
    bool identity = false;

    double zeta(double r) const;
    double eta(double r) const;
    double eta_d1(double r) const;
    double eta_d2(double r) const;
    double laplacian_eta(int N, double r) const; // eta'' + (N-1) eta'/r
};

CutoffPair make_cutoff_pair(double s0);
CutoffPair make_identity_cutoff_pair(double s0);

/// Data for the companion problem on the full ball of radius rho, tabulated
/// per flat harmonic slot on the uniform grid r_i = i*rho/M, i = 0..M. An
/// empty slot vector reads as zero.
struct PsiRhs {
    double rho = 0.9;
    int M = 4096;
    std::vector<std::vector<double>> values;
};

/// Companion unknown: regular through r = 0, Dirichlet zero at r = rho,
/// stored on the same uniform grid as its PsiRhs.
struct PsiSolution {
    double rho = 0.0;
    double dr = 0.0;
    std::vector<std::vector<double>> coeffs;
    double sup_gradient = 0.0; // node-sampled sup |grad|, r > 0
};

/// Cubic interpolation of one coefficient profile (and its derivative) off
/// the uniform storage grid. Slot must be active; 0 <= r <= rho.
double psi_slot_value(const PsiSolution& psi, int idx, double r);
double psi_slot_derivative(const PsiSolution& psi, int idx, double r);

/// Mode-wise solve of  -lap(psi) + (1-zeta) p (x . grad psi) / (beta|x|^2 +
/// t|x|^(alpha+1)) = rhs  on B_rho, psi = 0 on the boundary, regular at the
/// origin. The drift vanishes where zeta == 1, so every mode problem is a
/// regular advection-diffusion two-point BVP. The angular set is only needed
/// for sup_gradient when slots of degree >= 1 are active.
PsiSolution solve_psi(const Params& params, double t, const CutoffPair& cut, const PsiRhs& rhs,
                      std::shared_ptr<const AngularSet> angular = nullptr);

struct GlueConfig {
    double t = 1e3;
    double rho = 0.9;    // outer radius of the truncated domain
    double s0 = 0.02;    // cutoff scale; needs rho >= 10 s0
    int M_ball = 32768;  // log grid for the unit-ball sub-solve
    int M_psi = 65536;   // uniform grid for the companion sub-solve
    int max_outer = 12;
    double tol_X = 1e-8;        // stop when successive iterates differ this little
    double residual_tol = 1e-4; // handed to the unit-ball sub-solver
    bool identity_cutoffs = false; // disable localization (requires rho == 1)
};

struct GlueReport {
    ModeField varphi;     // unit-ball sub-solution (log grid on [r_min, 1])
    PsiSolution psi;      // companion sub-solution (uniform grid on [0, rho])
    ModeField assembled;  // eta * varphi + psi on the data grid
    std::vector<double> outer_steps;
    std::vector<double> outer_ratios;
    int outer_iterations = 0;
    bool converged = false;
    double residual = 0.0; // weighted defect of the assembled solution
    double norm_X = 0.0;   // of the assembled solution
    double norm_Y = 0.0;   // of the data
    double delta_t = 0.0;  // sup_(0,rho] r^(sigma+1)/(beta + t r^(alpha-1))
};

/// Solve the linearized equation on the truncated domain B_rho with zero
/// boundary data by alternating the two sub-problems: the companion solve
/// absorbs the data away from the origin, the unit-ball solve absorbs the
/// singular region, and the cutoff pair exchanges coupling terms between
/// them. f lives on a log grid [r_min, rho] with r_min <= s0/4. Throws
/// DivergenceError when an outer step ratio reaches 1.
GlueReport glue_linear_solve(const Params& params, const ModeField& f, const GlueConfig& config);

/// sup over 2 s0 < r <= rho of |I1| + |I2| + |I3'| for the cutoff matching
/// terms of the explicit profile: I1 = u_t lap(eta) + 2 eta' u_t', I2 =
/// |grad(eta u_t)|^p - eta |grad u_t|^p, I3' = ||grad(eta u_t)|^(p-2)
/// grad(eta u_t) - |grad u_t|^(p-2) grad u_t|. Decays like the profile scale
/// t^(-1/(p-1)) as t grows; identically 0 for an identity pair.
double cutoff_matching_error(const Params& params, double t, const CutoffPair& cut, double rho,
                             int n_samples = 4096);

struct BoundedConfig {
    double t = 1e3;
    double rho = 0.9;
    double s0 = 0.02;
    double r_min = 1e-6;
    int M_omega = 4096; // log grid carrying the iterates and the data
    int M_ball = 16384;
    int M_psi = 16384;
    int max_iter = 40;
    double tol_X = 1e-7;
    int max_outer = 12;
    double outer_tol = 1e-8;
    double residual_tol = 1e-4;
    bool eta_identity = false; // rho must then be 1; reduces to the interior solver
};

struct BoundedReport {
    ModeField phi;          // correction on the data grid [r_min, rho]
    GlueReport last_linear; // glued solve of the final iteration
    int iterations = 0;
    bool converged = false;
    std::vector<double> step_norms;
    double contraction_factor = 0.0;
    double norm_X = 0.0;   // of phi
    double eps_t = 0.0;    // cutoff matching error at this t
    double residual = 0.0; // weighted defect of -lap(u) - |grad u|^p
    double boundary_sup = 0.0;
    bool positive = false;
    bool blow_up_preserved = false;
};

/// Picard iteration for a bounded classical solution u = eta u_t + phi on
/// B_rho with u = 0 on the boundary: each step feeds the cutoff matching
/// terms plus the gradient nonlinearity into the glued linear solver.
/// Radial-only (the matching terms are radial). Throws DivergenceError when
/// step ratios stop contracting.
BoundedReport solve_bounded_domain(const Params& params, const BoundedConfig& config);

} // namespace singrad
