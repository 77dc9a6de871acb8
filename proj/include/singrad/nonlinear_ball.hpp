#pragma once

#include "singrad/linear_ball.hpp"
#include "singrad/mode_field.hpp"
#include "singrad/params.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace singrad {

/// Multiplicative perturbation g of the gradient nonlinearity. Admissible
/// perturbations vanish at the origin and keep 1 + g positive.
struct PerturbationG {
    enum class Kind { PowerRadial, PowerTimesAngular, Custom };

    Kind kind = Kind::PowerRadial;
    double c = 0.0; // amplitude, >= 0 for the power kinds
    double q = 1.0; // radial rate, > 0 for the power kinds
    std::function<double(double, const std::array<double, 3>&)> custom;

    double operator()(double r, const std::array<double, 3>& dir) const;
    bool radial() const { return kind == Kind::PowerRadial; }
};

/// g(x) = c r^q.
PerturbationG make_power_radial(double c, double q);

/// g(x) = c r^q (1 + x3 / (2 r)).
PerturbationG make_power_angular(double c, double q);

/// Arbitrary perturbation; probed near the origin for admissibility
/// (vanishing there, bounded below by -0.9).
PerturbationG make_custom_perturbation(
    std::function<double(double, const std::array<double, 3>&)> fn);

/// Which profile the correction expands around: the explicit singular profile
/// or zero (the latter turns the fixed-point equation into the unperturbed
/// problem for the correction alone).
enum class BaseProfile { UT, Zero };

/// Data of the fixed-point map: g |grad u + grad phi|^p plus the quadratic
/// Taylor remainder of |.|^p around grad u, decomposed to phi's band limit.
ModeField nonlinear_rhs(const Params& params, double t, const PerturbationG& g,
                        const ModeField& phi, BaseProfile base = BaseProfile::UT);

struct SolverConfig {
    double t = 1e3;
    double R = 1.0;       // X-norm cap for the iterates
    double delta = 0.5;   // required contraction margin, in (0,1)
    int max_iter = 50;
    double tol_X = 1e-8;  // step norm below which the iteration stops
    int K_max = 0;        // 0 keeps a radial perturbation radial
    double residual_tol = 1e-4;
    BaseProfile base = BaseProfile::UT;
    std::shared_ptr<const RadialGrid> grid;
    std::shared_ptr<const AngularSet> angular; // required when K_max > 0
};

struct AnnulusRow {
    double r_lo = 0.0, r_hi = 0.0;
    double residual = 0.0;   // sup r^(sigma+2)|PDE defect| inside the annulus
    double min_scaled_u = 0.0; // min r^sigma u inside the annulus
};

struct VerificationReport {
    double residual = 0.0; // sup over the safe interior r >= 10 r_min
    bool positive = false; // u > 0 strictly inside the ball
    bool blow_up_preserved = false; // u(r_min) >= u_t(r_min)/2 on all rays
    std::vector<AnnulusRow> annuli;  // dyadic rows [2^-j-1, 2^-j]
};

/// Pointwise check of -Delta u = (1+g)|grad u|^p for u = base + phi.
VerificationReport verify_solution(const Params& params, double t,
                                   const PerturbationG& g, const ModeField& phi,
                                   BaseProfile base = BaseProfile::UT);

struct PicardReport {
    ModeField phi;
    int iterations = 0;
    bool converged = false;
    std::vector<double> step_norms;    // X-norm of successive updates
    double contraction_factor = 0.0;   // worst observed step ratio
    double norm_X = 0.0;               // of the final correction
    VerificationReport verification;
};

/// Fixed-point construction of the perturbed singular solution. Throws
/// ConfigError when an iterate leaves the configured X-ball (the smallness
/// condition fails for this configuration) and DivergenceError after three
/// consecutive non-contracting steps.
PicardReport picard_solve(const Params& params, const PerturbationG& g,
                          const SolverConfig& config);

} // namespace singrad
