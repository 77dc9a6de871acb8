#include "singrad/nonlinear_ball.hpp"

#include "singrad/angular.hpp"
#include "singrad/errors.hpp"
#include "singrad/grid.hpp"
#include "singrad/mode_analysis.hpp"
#include "singrad/radial_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace singrad {

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;

double power_abs(double x, double e) { return std::pow(std::abs(x), e); }

// |v|^p - |w|^p - p|w|^(p-2) w.(v - w) for collinear or full vectors reduces
// to this scalar helper with the signed magnitudes along the relevant axes
double taylor_remainder(double p, double norm_total, double norm_base,
                        double base_dot_increment) {
    const double linear =
        norm_base != 0.0 ? p * power_abs(norm_base, p - 2.0) * base_dot_increment
                         : 0.0;
    return power_abs(norm_total, p) - power_abs(norm_base, p) - linear;
}

void probe_custom(const PerturbationG& g) {
    const std::array<std::array<double, 3>, 6> dirs = {{{1, 0, 0},
                                                        {-1, 0, 0},
                                                        {0, 1, 0},
                                                        {0, -1, 0},
                                                        {0, 0, 1},
                                                        {0, 0, -1}}};
    for (const auto& dir : dirs) {
        const double near_origin = g.custom(1e-10, dir);
        if (!(std::abs(near_origin) <= 0.1))
            throw DomainError("custom perturbation must vanish at the origin");
        for (double r : {1e-6, 1e-3, 0.1, 0.5, 1.0}) {
            if (!(g.custom(r, dir) > -0.9))
                throw DomainError("custom perturbation must keep 1 + g positive");
        }
    }
}

} // namespace

double PerturbationG::operator()(double r, const std::array<double, 3>& dir) const {
    switch (kind) {
        case Kind::PowerRadial:
            return c * std::pow(r, q);
        case Kind::PowerTimesAngular:
            return c * std::pow(r, q) * (1.0 + 0.5 * dir[2]);
        case Kind::Custom:
            return custom(r, dir);
    }
    throw DomainError("perturbation kind out of range");
}

PerturbationG make_power_radial(double c, double q) {
    if (c < 0.0) throw DomainError("perturbation amplitude must be >= 0");
    if (q <= 0.0) throw DomainError("perturbation must vanish at the origin (q > 0)");
    PerturbationG g;
    g.kind = PerturbationG::Kind::PowerRadial;
    g.c = c;
    g.q = q;
    return g;
}

PerturbationG make_power_angular(double c, double q) {
    PerturbationG g = make_power_radial(c, q);
    g.kind = PerturbationG::Kind::PowerTimesAngular;
    return g;
}

PerturbationG make_custom_perturbation(
    std::function<double(double, const std::array<double, 3>&)> fn) {
    if (!fn) throw DomainError("custom perturbation needs a callable");
    PerturbationG g;
    g.kind = PerturbationG::Kind::Custom;
    g.custom = std::move(fn);
    probe_custom(g);
    return g;
}

ModeField nonlinear_rhs(const Params& params, double t, const PerturbationG& g,
                        const ModeField& phi, BaseProfile base) {
    if (params.regime != Regime::Ball)
        throw DomainError("nonlinear_rhs: ball regime required");
    if (!phi.grid) throw DomainError("nonlinear_rhs: field has no grid");
    const RadialGrid& grid = *phi.grid;
    const std::vector<std::vector<double>> derivs = radial_derivatives(phi);
    const double p = params.p;

    auto base_slope = [&](double r) {
        return base == BaseProfile::UT ? du_ball(params, t, r) : 0.0;
    };

    if (phi.radial_only() && g.radial()) {
        std::vector<double> values(grid.size());
        const bool active = phi.active(0);
        static const std::array<double, 3> kUp = {0.0, 0.0, 1.0};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.r[i];
            const double du = base_slope(r);
            const double dphi = active ? derivs[0][i] / std::sqrt(kFourPi) : 0.0;
            const double total = du + dphi;
            values[i] = g(r, kUp) * power_abs(total, p) +
                        taylor_remainder(p, total, du, du * dphi);
        }
        return make_radial_field(phi.grid, phi.angular, params, values);
    }

    if (!phi.angular)
        throw DomainError("nonlinear_rhs: angular set required for non-radial data");
    const AngularSet& set = *phi.angular;
    std::vector<std::vector<double>> values(grid.size(),
                                            std::vector<double>(set.n_nodes()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.r[i];
        const double du = base_slope(r);
        for (std::size_t j = 0; j < set.n_nodes(); ++j) {
            const std::array<double, 3>& dir = set.nodes[j].dir;
            const std::array<double, 3> gphi = gradient_at(phi, derivs, i, j);
            const double dot_dir = gphi[0] * dir[0] + gphi[1] * dir[1] + gphi[2] * dir[2];
            const double total =
                std::sqrt((du * dir[0] + gphi[0]) * (du * dir[0] + gphi[0]) +
                          (du * dir[1] + gphi[1]) * (du * dir[1] + gphi[1]) +
                          (du * dir[2] + gphi[2]) * (du * dir[2] + gphi[2]));
            values[i][j] = g(r, dir) * power_abs(total, p) +
                           taylor_remainder(p, total, du, du * dot_dir);
        }
    }
    return decompose_nodal(phi.grid, phi.angular, params, phi.K_max, values);
}

VerificationReport verify_solution(const Params& params, double t,
                                   const PerturbationG& g, const ModeField& phi,
                                   BaseProfile base) {
    if (params.regime != Regime::Ball)
        throw DomainError("verify_solution: ball regime required");
    if (!phi.grid) throw DomainError("verify_solution: field has no grid");
    const RadialGrid& grid = *phi.grid;
    const std::size_t M = grid.size();
    if (M < 16) throw DomainError("verify_solution: need at least 16 nodes");
    const double p = params.p;
    const bool with_base = base == BaseProfile::UT;
    const bool radial = phi.radial_only() && g.radial();
    if (!radial && !phi.angular)
        throw DomainError("verify_solution: angular set required for non-radial data");

    const std::vector<std::vector<double>> derivs = radial_derivatives(phi);
    const std::size_t n_dirs = radial ? 1 : phi.angular->n_nodes();

    // per-slot Laplacian profiles
    std::vector<std::vector<double>> laps(phi.coeffs.size());
    for (std::size_t idx = 0; idx < phi.coeffs.size(); ++idx) {
        if (!phi.coeffs[idx].empty())
            laps[idx] = mode_laplacian(grid, phi.coeffs[idx], params.N,
                                       lambda_k(params.N, AngularSet::degree_of(
                                                              static_cast<int>(idx))));
    }

    static const std::array<double, 3> kUp = {0.0, 0.0, 1.0};
    auto sample = [&](std::size_t i, std::size_t j, double& u, double& grad_norm,
                      double& lap, double& g_val) {
        const double r = grid.r[i];
        const double u_base = with_base ? u_ball(params, t, r) : 0.0;
        const double du = with_base ? du_ball(params, t, r) : 0.0;
        const double lap_base =
            with_base ? d2u_ball(params, t, r) + (params.N - 1) * du / r : 0.0;
        if (radial) {
            const double root = std::sqrt(kFourPi);
            const double a = phi.active(0) ? phi.coeffs[0][i] / root : 0.0;
            const double da = phi.active(0) ? derivs[0][i] / root : 0.0;
            const double la = phi.active(0) ? laps[0][i] / root : 0.0;
            u = u_base + a;
            grad_norm = std::abs(du + da);
            lap = lap_base + la;
            g_val = g(r, kUp);
        } else {
            const std::array<double, 3>& dir = phi.angular->nodes[j].dir;
            double lap_phi = 0.0;
            for (std::size_t idx = 0; idx < phi.coeffs.size(); ++idx) {
                if (!phi.coeffs[idx].empty())
                    lap_phi += laps[idx][i] * phi.angular->basis[idx][j];
            }
            const std::array<double, 3> gphi = gradient_at(phi, derivs, i, j);
            u = u_base + value_at(phi, i, j);
            grad_norm = std::sqrt((du * dir[0] + gphi[0]) * (du * dir[0] + gphi[0]) +
                                  (du * dir[1] + gphi[1]) * (du * dir[1] + gphi[1]) +
                                  (du * dir[2] + gphi[2]) * (du * dir[2] + gphi[2]));
            lap = lap_base + lap_phi;
            g_val = g(r, dir);
        }
    };

    VerificationReport report;
    report.positive = true;
    const double safe_lo = 10.0 * grid.r_min;
    const double u_floor = with_base ? 0.5 * u_ball(params, t, grid.r_min) : 0.0;
    double inner_min = std::numeric_limits<double>::infinity();

    // dyadic annuli [2^-j-1, 2^-j] intersecting the grid
    std::vector<AnnulusRow> rows;
    for (int j = 0; std::ldexp(1.0, -j - 1) >= grid.r_min * 0.999; ++j) {
        AnnulusRow row;
        row.r_lo = std::ldexp(1.0, -j - 1);
        row.r_hi = std::ldexp(1.0, -j);
        row.min_scaled_u = std::numeric_limits<double>::infinity();
        rows.push_back(row);
        if (rows.size() > 64) break;
    }

    for (std::size_t i = 0; i < M; ++i) {
        const double r = grid.r[i];
        const double w = std::pow(r, params.sigma + 2.0);
        const bool stencil_ok = i >= 3 && i + 3 < M;
        for (std::size_t j = 0; j < n_dirs; ++j) {
            double u, grad_norm, lap, g_val;
            sample(i, j, u, grad_norm, lap, g_val);
            const double defect = -lap - (1.0 + g_val) * power_abs(grad_norm, p);
            if (i + 1 < M && u <= 0.0) report.positive = false;
            if (i == 0) inner_min = std::min(inner_min, u);
            if (stencil_ok && r >= safe_lo)
                report.residual = std::max(report.residual, w * std::abs(defect));
            for (AnnulusRow& row : rows) {
                if (r < row.r_lo || r > row.r_hi) continue;
                if (stencil_ok)
                    row.residual = std::max(row.residual, w * std::abs(defect));
                row.min_scaled_u =
                    std::min(row.min_scaled_u, std::pow(r, params.sigma) * u);
            }
        }
    }

    for (AnnulusRow& row : rows)
        if (!std::isfinite(row.min_scaled_u)) row.min_scaled_u = 0.0;
    report.annuli = std::move(rows);
    report.blow_up_preserved = with_base && inner_min >= u_floor;
    return report;
}

PicardReport picard_solve(const Params& params, const PerturbationG& g,
                          const SolverConfig& config) {
    if (params.regime != Regime::Ball)
        throw ConfigError("picard_solve: ball regime required");
    if (!config.grid) throw ConfigError("picard_solve: no grid configured");
    if (config.t < 1.0) throw ConfigError("picard_solve: t must be >= 1");
    if (config.R <= 0.0) throw ConfigError("picard_solve: X-ball radius must be positive");
    if (config.delta <= 0.0 || config.delta >= 1.0)
        throw ConfigError("picard_solve: contraction margin must lie in (0,1)");
    if (config.max_iter < 1) throw ConfigError("picard_solve: max_iter must be >= 1");
    if (!g.radial() && config.K_max < 1)
        throw ConfigError("picard_solve: non-radial perturbation needs K_max >= 1");
    if (config.K_max > 0 && !config.angular)
        throw ConfigError("picard_solve: K_max > 0 needs an angular set");

    PicardReport report;
    report.phi = make_mode_field(config.grid, config.angular, params, config.K_max);

    double prev_step = -1.0;
    int non_contracting = 0;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const ModeField rhs = nonlinear_rhs(params, config.t, g, report.phi, config.base);
        LinearSolveReport lin = solve_Lt(params, config.t, rhs, config.residual_tol);
        const double step = diff_norm_X(lin.phi, report.phi);
        report.phi = std::move(lin.phi);
        report.step_norms.push_back(step);
        report.iterations = iter;

        if (prev_step > 0.0) {
            const double ratio = step / prev_step;
            report.contraction_factor = std::max(report.contraction_factor, ratio);
            if (ratio >= 1.0 - config.delta) {
                if (++non_contracting >= 3)
                    throw DivergenceError("picard_solve: three consecutive steps "
                                          "missed the contraction margin");
            } else {
                non_contracting = 0;
            }
        }

        report.norm_X = norms(report.phi).norm_X;
        if (!std::isfinite(report.norm_X))
            throw DivergenceError("picard_solve: iterate overflowed");
        if (report.norm_X > config.R)
            throw ConfigError("picard_solve: iterate left the configured X-ball; the "
                              "smallness condition fails for this configuration");
        if (step <= config.tol_X) {
            report.converged = true;
            break;
        }
        prev_step = step;
    }

    report.verification =
        verify_solution(params, config.t, g, report.phi, config.base);
    return report;
}

} // namespace singrad
