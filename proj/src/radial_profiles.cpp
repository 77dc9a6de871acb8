#include "singrad/radial_profiles.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "singrad/errors.hpp"
#include "singrad/quadrature.hpp"

namespace singrad {

namespace {

void require_ball(const Params& params, const char* op) {
    if (params.regime != Regime::Ball) {
        throw DomainError(std::string(op) + " requires ball-regime Params");
    }
}

void require_exterior(const Params& params, const char* op) {
    if (params.regime != Regime::Exterior) {
        throw DomainError(std::string(op) + " requires exterior-regime Params");
    }
}

void check_ball_args(const Params& params, double t, double r, const char* op) {
    require_ball(params, op);
    if (!(t >= 0.0)) {
        throw DomainError(std::string(op) + ": negative t is outside the verified family");
    }
    if (!(r > 0.0) || r > 1.0) {
        std::ostringstream msg;
        msg << op << ": radius " << r << " outside (0, 1]";
        throw DomainError(msg.str());
    }
}

void check_exterior_args(const Params& params, double t, double r, bool allow_near_beta,
                         const char* op) {
    require_exterior(params, op);
    if (!(r >= 1.0)) {
        std::ostringstream msg;
        msg << op << ": radius " << r << " below 1";
        throw DomainError(msg.str());
    }
    if (!(t > params.beta)) {
        std::ostringstream msg;
        msg << op << ": t = " << t << " must exceed beta = " << params.beta;
        throw DomainError(msg.str());
    }
    if (t < 2.0 * params.beta) {
        if (!allow_near_beta) {
            std::ostringstream msg;
            msg << op << ": t = " << t << " below 2*beta = " << 2.0 * params.beta
                << "; pass allow_near_beta to accept the poorly conditioned family member";
            throw DomainError(msg.str());
        }
        static bool warned = false;
        if (!warned) {
            std::cerr << "warning: exterior profile with t in (beta, 2*beta); the integrand "
                         "is large near r = 1 and quadrature cost grows as t -> beta\n";
            warned = true;
        }
    }
}

} // namespace

double u_ball(const Params& params, double t, double r) {
    check_ball_args(params, t, r, "u_ball");
    if (r == 1.0) return 0.0;
    const double inv_pm1 = 1.0 / (params.p - 1.0);
    const double beta = params.beta;
    const double alpha = params.alpha;
    auto integrand = [=](double y) { return std::pow(beta * y + t * std::pow(y, alpha), -inv_pm1); };
    return integrate_log(integrand, r, 1.0, 1e-12).value;
}

double du_ball(const Params& params, double t, double r) {
    check_ball_args(params, t, r, "du_ball");
    return -std::pow(params.beta * r + t * std::pow(r, params.alpha), -1.0 / (params.p - 1.0));
}

double d2u_ball(const Params& params, double t, double r) {
    check_ball_args(params, t, r, "d2u_ball");
    const double p = params.p;
    const double base = params.beta * r + t * std::pow(r, params.alpha);
    const double dbase = params.beta + t * params.alpha * std::pow(r, params.alpha - 1.0);
    return dbase / (p - 1.0) * std::pow(base, -p / (p - 1.0));
}

double psi_t(const Params& params, double t, double r) {
    check_ball_args(params, t, r, "psi_t");
    if (!(t > 0.0)) throw DomainError("psi_t: t must be positive");
    if (r == 1.0) return 0.0;
    const double p = params.p;
    const double beta = params.beta;
    const double alpha = params.alpha;
    const double expo = p / (p - 1.0);
    auto integrand = [=](double y) {
        return std::pow(y, alpha) * std::pow(beta * y + t * std::pow(y, alpha), -expo);
    };
    return integrate_log(integrand, r, 1.0, 1e-12).value / (p - 1.0);
}

double u_exterior(const Params& params, double t, double r, bool allow_near_beta) {
    check_exterior_args(params, t, r, allow_near_beta, "u_exterior");
    if (r == 1.0) return 0.0;
    const double inv_pm1 = 1.0 / (params.p - 1.0);
    const double beta = params.beta;
    const double alpha = params.alpha;
    auto integrand = [=](double y) { return std::pow(t * std::pow(y, alpha) - beta * y, -inv_pm1); };
    return integrate_log(integrand, 1.0, r, 1e-12).value;
}

double du_exterior(const Params& params, double t, double r, bool allow_near_beta) {
    check_exterior_args(params, t, r, allow_near_beta, "du_exterior");
    return std::pow(t * std::pow(r, params.alpha) - params.beta * r, -1.0 / (params.p - 1.0));
}

double d2u_exterior(const Params& params, double t, double r, bool allow_near_beta) {
    check_exterior_args(params, t, r, allow_near_beta, "d2u_exterior");
    const double p = params.p;
    const double base = t * std::pow(r, params.alpha) - params.beta * r;
    const double dbase = t * params.alpha * std::pow(r, params.alpha - 1.0) - params.beta;
    return -dbase / (p - 1.0) * std::pow(base, -p / (p - 1.0));
}

double profile_residual(const Params& params, double t, double r) {
    double du = 0.0;
    double d2u = 0.0;
    if (params.regime == Regime::Ball) {
        du = du_ball(params, t, r);
        d2u = d2u_ball(params, t, r);
    } else {
        du = du_exterior(params, t, r);
        d2u = d2u_exterior(params, t, r);
    }
    const double lap = d2u + (params.N - 1) * du / r;
    return -lap - std::pow(std::abs(du), params.p);
}

double threshold_radius(const Params& params, double t) {
    if (!(t > 0.0)) throw DomainError("threshold_radius: t must be positive");
    return std::pow(t, -1.0 / (params.alpha - 1.0));
}

double branch_crossover_radius(const Params& params, double t) {
    if (!(t > 0.0)) throw DomainError("branch_crossover_radius: t must be positive");
    return std::pow(params.beta / t, 1.0 / (params.alpha - 1.0));
}

AsympReport asymp_check(const Params& params, double t, const RadialGrid& grid) {
    require_ball(params, "asymp_check");
    AsympReport report;
    report.crossover_radius = t > 0.0 ? branch_crossover_radius(params, t) : 0.0;
    const double inv_pm1 = 1.0 / (params.p - 1.0);
    const double rel_tol = 1e-12;
    for (double r : grid.r) {
        if (r > 1.0) continue;
        const double d = -du_ball(params, t, r);
        const double branch1 = params.c_beta * std::pow(r, -inv_pm1);
        const double branch2 =
            t > 0.0 ? std::pow(t, -inv_pm1) * std::pow(r, -(params.N - 1.0)) : branch1;
        const double bound = std::min(branch1, branch2);
        if (d > bound * (1.0 + rel_tol)) {
            ++report.violations;
            report.max_violation_rel = std::max(report.max_violation_rel, (d - bound) / bound);
        } else {
            report.max_slack_rel = std::max(report.max_slack_rel, (bound - d) / bound);
        }
        report.sup_weighted_du =
            std::max(report.sup_weighted_du, std::pow(r, params.sigma + 1.0) * d);
    }
    report.passed = report.violations == 0 &&
                    report.sup_weighted_du <= params.c_beta * (1.0 + rel_tol);
    return report;
}

double RadialProfile::value(double r) const {
    switch (kind) {
        case ProfileKind::BallSolution: return u_ball(params, t, r);
        case ProfileKind::ExteriorSolution: return u_exterior(params, t, r);
        case ProfileKind::KernelPsi: return psi_t(params, t, r);
    }
    return 0.0;
}

double RadialProfile::derivative(double r) const {
    switch (kind) {
        case ProfileKind::BallSolution: return du_ball(params, t, r);
        case ProfileKind::ExteriorSolution: return du_exterior(params, t, r);
        case ProfileKind::KernelPsi: return 0.0;
    }
    return 0.0;
}

} // namespace singrad
