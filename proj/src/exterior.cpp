#include "singrad/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "singrad/errors.hpp"
#include "singrad/gluing.hpp"
#include "singrad/grid.hpp"
#include "singrad/mode_analysis.hpp"
#include "singrad/radial_profiles.hpp"

namespace singrad {

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;
constexpr double kEtaInner = 2.0;
constexpr double kEtaOuter = 3.0;

double power_abs(double x, double e) { return std::pow(std::abs(x), e); }

double odd_power(double x, double e) {
    return x == 0.0 ? 0.0 : std::copysign(power_abs(x, e), x);
}

void require_exterior(const Params& params, const char* op) {
    if (params.regime != Regime::Exterior)
        throw RegimeError(std::string(op) + ": exterior regime only");
}

// Exterior X norm taken from supplied derivative profiles instead of grid
// differencing: differencing a difference of two near-identical solves turns
// node-level rounding into a large spurious gradient under the r^(sigma+1)
// weight, while the solver's exact slopes keep the metric at solver accuracy.
double x_norm_exact(const ModeField& field, const std::vector<std::vector<double>>& derivs) {
    const std::size_t M = field.n_radial();
    const bool radial = field.radial_only();
    const std::size_t n_dirs = radial ? 1 : field.angular->n_nodes();
    double sup = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double w1 = std::pow(field.grid->r[i], field.params.sigma + 1.0);
        for (std::size_t j = 0; j < n_dirs; ++j)
            sup = std::max(sup, w1 * std::sqrt(gradient_sq_at(field, derivs, i, j)));
    }
    return sup;
}

// Composite cubic panel rule: the integral over [x_j, x_{j+1}] from the four
// samples nearest the panel. Offsets are relative to the left node j; the two
// edge panels shift their stencil inward.
struct PanelRule {
    int off[4];
    double c[4]; // multiply by h/24
};

PanelRule panel_rule(int j, int n) {
    if (j == 0) return {{0, 1, 2, 3}, {9.0, 19.0, -5.0, 1.0}};
    if (j == n - 2) return {{-2, -1, 0, 1}, {1.0, -5.0, 19.0, 9.0}};
    return {{-1, 0, 1, 2}, {-1.0, 13.0, 13.0, -1.0}};
}

// Running prefix integrals of a premultiplied integrand: out[i] = int_0^{s_i}.
std::vector<double> prefix_integral(const std::vector<double>& w, double h) {
    const int n = static_cast<int>(w.size());
    std::vector<double> out(n, 0.0);
    for (int j = 0; j + 1 < n; ++j) {
        const PanelRule rule = panel_rule(j, n);
        double panel = 0.0;
        for (int m = 0; m < 4; ++m) panel += rule.c[m] * w[j + rule.off[m]];
        out[j + 1] = out[j] + panel * h / 24.0;
    }
    return out;
}

struct ModeGreen {
    std::vector<double> a;   // profile on the level nodes
    std::vector<double> a_s; // d/d(ln r)
};

/// Exact solve of A_ss + (N-2) A_s - lambda A = g on [0, S] with A(0) = 0 and
/// A_s(S) = 0, via the two-sided Green representation in the characteristic
/// roots gp >= 0 >= gm of x^2 + (N-2)x - lambda. Every exponential that
/// appears is normalized to magnitude <= 1, so the only scale in the problem
/// enters through the final division; n uniform nodes with spacing h.
ModeGreen green_mode_solve(double gp, double gm, double h, const std::vector<double>& g) {
    const int n = static_cast<int>(g.size());
    const double S = (n - 1) * h;
    const double gap = gp - gm; // sqrt((N-2)^2 + 4 lambda) > 0
    if (-gm * S > 600.0)
        throw DomainError("green_mode_solve: mode too stiff for this truncation span");

    // J1(s) = int_s^S e^{gm (S - sigma)} g and the two-sided prefix
    // W(s) = int_0^s (e^{-gm sigma} - e^{-gp sigma}) g: fixed-anchor weights,
    // premultiplied then summed, so accumulation noise is never amplified by a
    // growing exponential downstream.
    std::vector<double> w1(n), wW(n);
    for (int i = 0; i < n; ++i) {
        const double s = i * h;
        w1[i] = std::exp(gm * (S - s)) * g[i];
        wW[i] = (std::exp(-gm * s) - std::exp(-gp * s)) * g[i];
    }
    const std::vector<double> W = prefix_integral(wW, h);
    std::vector<double> J1(n, 0.0);
    for (int j = n - 2; j >= 0; --j) {
        const PanelRule rule = panel_rule(j, n);
        double panel = 0.0;
        for (int m = 0; m < 4; ++m) panel += rule.c[m] * w1[j + rule.off[m]];
        J1[j] = J1[j + 1] + panel * h / 24.0;
    }

    // J2(s) = int_s^S e^{-gp (sigma - s)} g carries a moving anchor: a
    // one-panel backward recurrence whose per-step factor damps old error.
    std::vector<double> J2(n, 0.0);
    const double shift2 = std::exp(-gp * h);
    for (int j = n - 2; j >= 0; --j) {
        const PanelRule rule = panel_rule(j, n);
        double panel = 0.0;
        for (int m = 0; m < 4; ++m)
            panel += rule.c[m] * std::exp(-gp * rule.off[m] * h) * g[j + rule.off[m]];
        J2[j] = panel * h / 24.0 + shift2 * J2[j + 1];
    }

    const double D = gp - gm * std::exp(-gap * S);
    if (!(D > 0.0))
        throw DomainError("green_mode_solve: truncation span too large for this mode");
    const double Q = gap * D;

    ModeGreen out;
    out.a.resize(n);
    out.a_s.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = i * h;
        const double E1 = std::exp(-gp * (S - s));
        const double E2 = std::exp(-gap * s);
        const double E4 = std::exp(gp * (s - S) + gm * S);
        const double E5 = std::exp(gm * s);
        const double one = 1.0 - E2;
        const double slope = gp - gm * E2;
        out.a[i] =
            (gm * E1 * one * J1[i] - gp * one * J2[i] + (gm * E4 - gp * E5) * W[i]) / Q;
        out.a_s[i] = (gm * E1 * slope * J1[i] - gp * slope * J2[i] +
                      gp * gm * (E4 - E5) * W[i]) /
                     Q;
    }
    return out;
}

std::vector<int> snapped_levels(const RadialGrid& grid, const TruncationConfig& config,
                                const char* op) {
    if (config.R_levels.empty()) throw ConfigError(std::string(op) + ": empty level ladder");
    for (std::size_t i = 0; i + 1 < config.R_levels.size(); ++i)
        if (!(config.R_levels[i + 1] > config.R_levels[i]))
            throw ConfigError(std::string(op) + ": truncation levels must increase");
    if (std::abs(std::log(grid.r_max / config.R_levels.back())) > 1e-9)
        throw ConfigError(std::string(op) + ": grid must end at the largest truncation level");
    const int M = static_cast<int>(grid.size());
    std::vector<int> n_level;
    for (double R : config.R_levels) {
        int n = static_cast<int>(std::llround(std::log(R) / grid.dlog)) + 1;
        n = std::min(n, M);
        if (n < 16) throw ConfigError(std::string(op) + ": truncation level too close to r = 1");
        if (!n_level.empty() && n <= n_level.back())
            throw ConfigError(std::string(op) + ": truncation levels collapse after snapping");
        n_level.push_back(n);
    }
    n_level.back() = M;
    return n_level;
}

} // namespace

double exterior_eta(double r) { return 1.0 - smooth_cutoff(kEtaInner, kEtaOuter, r); }
double exterior_eta_d1(double r) { return -smooth_cutoff_d1(kEtaInner, kEtaOuter, r); }
double exterior_eta_d2(double r) { return -smooth_cutoff_d2(kEtaInner, kEtaOuter, r); }

TruncationReport laplace_exterior_solve(const Params& params, const ModeField& f,
                                        const TruncationConfig& config) {
    require_exterior(params, "laplace_exterior_solve");
    if (!f.grid) throw DomainError("laplace_exterior_solve: data field needs a grid");
    const RadialGrid& grid = *f.grid;
    const int M = static_cast<int>(grid.size());
    if (M < 64) throw ConfigError("laplace_exterior_solve: need at least 64 grid nodes");
    if (std::abs(grid.r_min - 1.0) > 1e-12)
        throw DomainError("laplace_exterior_solve: grid must start at the unit sphere");
    if (!(config.stabilization_tol > 0.0))
        throw ConfigError("laplace_exterior_solve: stabilization tolerance must be positive");
    const std::vector<int> n_level = snapped_levels(grid, config, "laplace_exterior_solve");
    const double h = grid.dlog;
    const int n_slots = static_cast<int>(f.coeffs.size());

    TruncationReport rep;
    rep.phi = make_mode_field(f.grid, f.angular, params, f.K_max);
    rep.phi_prime.resize(n_slots);
    std::vector<std::vector<double>> prev_a(n_slots), prev_da(n_slots);
    std::vector<double> neumann(n_slots, 0.0);
    for (std::size_t li = 0; li < n_level.size(); ++li) {
        const int n = n_level[li];
        rep.level_radii.push_back(grid.r[n - 1]);
        std::vector<std::vector<double>> cur_a(n_slots), cur_da(n_slots);
        for (int idx = 0; idx < n_slots; ++idx) {
            if (!f.active(idx)) continue;
            const int k = AngularSet::degree_of(idx);
            const EulerRoots roots = euler_roots(params, k, RadialOperator::Laplace);
            std::vector<double> g(n);
            for (int i = 0; i < n; ++i) g[i] = grid.r[i] * grid.r[i] * f.coeffs[idx][i];
            ModeGreen sol = green_mode_solve(roots.gamma_plus, roots.gamma_minus, h, g);
            cur_a[idx] = std::move(sol.a);
            cur_da[idx] = std::move(sol.a_s);
            for (int i = 0; i < n; ++i) cur_da[idx][i] /= grid.r[i]; // a' = a_s / r
            neumann[idx] = std::abs(cur_da[idx][n - 1]);
        }
        if (li > 0) {
            const int n_prev = n_level[li - 1];
            auto pg = std::make_shared<const RadialGrid>(
                make_log_grid(1.0, grid.r[n_prev - 1], n_prev));
            ModeField diff = make_mode_field(pg, f.angular, params, f.K_max);
            std::vector<std::vector<double>> ddiff(n_slots);
            for (int idx = 0; idx < n_slots; ++idx) {
                if (!f.active(idx)) continue;
                auto& d = diff.profile(idx);
                ddiff[idx].resize(n_prev);
                for (int i = 0; i < n_prev; ++i) {
                    d[i] = cur_a[idx][i] - prev_a[idx][i];
                    ddiff[idx][i] = cur_da[idx][i] - prev_da[idx][i];
                }
            }
            rep.level_gaps.push_back(x_norm_exact(diff, ddiff));
            if (rep.stabilized_at < 0 && rep.level_gaps.back() <= config.stabilization_tol)
                rep.stabilized_at = static_cast<int>(li);
        }
        prev_a = std::move(cur_a);
        prev_da = std::move(cur_da);
    }
    if (n_level.size() == 1) rep.stabilized_at = 0;
    if (rep.stabilized_at < 0 && config.require_stabilization) {
        std::ostringstream msg;
        msg << "laplace_exterior_solve: truncation ladder did not stabilize, last gap "
            << rep.level_gaps.back();
        throw TruncationError(msg.str());
    }

    ModeField lap = make_mode_field(f.grid, f.angular, params, f.K_max);
    double neumann_sup = 0.0;
    for (int idx = 0; idx < n_slots; ++idx) {
        if (!f.active(idx)) continue;
        rep.phi.profile(idx) = std::move(prev_a[idx]);
        rep.phi_prime[idx] = std::move(prev_da[idx]);
        neumann_sup = std::max(neumann_sup, neumann[idx]);
        const int k = AngularSet::degree_of(idx);
        lap.profile(idx) =
            mode_laplacian(grid, rep.phi.coeffs[idx], params.N, lambda_k(params.N, k));
    }
    rep.neumann_sup = neumann_sup;
    const double data_Y = norms(f).norm_Y;
    if (data_Y > 0.0)
        rep.norm_ratio = (x_norm_exact(rep.phi, rep.phi_prime) + norms(lap).norm_Y) / data_Y;
    return rep;
}

ModeField apply_exterior_drift(const Params& params, double t, const ModeField& phi) {
    require_exterior(params, "apply_exterior_drift");
    if (!phi.grid) throw DomainError("apply_exterior_drift: field needs a grid");
    if (!(t > params.beta)) throw DomainError("apply_exterior_drift: need t > beta");
    const RadialGrid& grid = *phi.grid;
    if (grid.r_min < 1.0 - 1e-12)
        throw DomainError("apply_exterior_drift: exterior grids start at r = 1");
    ModeField out = make_mode_field(phi.grid, phi.angular, params, phi.K_max);
    for (int idx = 0; idx < static_cast<int>(phi.coeffs.size()); ++idx) {
        if (!phi.active(idx)) continue;
        const std::vector<double> d = radial_derivative(grid, phi.coeffs[idx]);
        auto& o = out.profile(idx);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.r[i];
            o[i] = params.p * d[i] / (t * std::pow(r, params.alpha) - params.beta * r);
        }
    }
    return out;
}

ExteriorLinearReport solve_Lt_exterior(const Params& params, double t, const ModeField& f,
                                       const TruncationConfig& trunc, int max_iter,
                                       double tol_X) {
    require_exterior(params, "solve_Lt_exterior");
    if (max_iter < 1) throw ConfigError("solve_Lt_exterior: max_iter must be positive");
    if (!(tol_X > 0.0)) throw ConfigError("solve_Lt_exterior: tolerance must be positive");
    if (!(t > params.beta)) throw DomainError("solve_Lt_exterior: need t > beta");

    ExteriorLinearReport rep;
    rep.norm_Y = norms(f).norm_Y;
    const RadialGrid& grid = *f.grid;
    const std::size_t M = grid.size();
    TruncationReport cur = laplace_exterior_solve(params, f, trunc);
    double prev_step = x_norm_exact(cur.phi, cur.phi_prime);
    rep.step_norms.push_back(prev_step);
    // Corrections cannot shrink below the arithmetic noise of the repeated
    // ladder solves; treat that floor as converged rather than stalled.
    const double floor_X = 1e-11 * std::max(prev_step, 1.0);
    bool done = prev_step <= tol_X;
    int strikes = 0;
    while (!done && static_cast<int>(rep.step_norms.size()) < max_iter) {
        ModeField data = f;
        for (int idx = 0; idx < static_cast<int>(cur.phi.coeffs.size()); ++idx) {
            if (!cur.phi.active(idx)) continue;
            auto& dd = data.profile(idx);
            for (std::size_t i = 0; i < M; ++i) {
                const double r = grid.r[i];
                dd[i] -= params.p * cur.phi_prime[idx][i] /
                         (t * std::pow(r, params.alpha) - params.beta * r);
            }
        }
        TruncationReport next = laplace_exterior_solve(params, data, trunc);
        ModeField diff = next.phi;
        add_scaled(diff, cur.phi, -1.0);
        std::vector<std::vector<double>> ddiff(next.phi_prime.size());
        for (std::size_t idx = 0; idx < next.phi_prime.size(); ++idx) {
            if (next.phi_prime[idx].empty()) continue;
            ddiff[idx].resize(M);
            for (std::size_t i = 0; i < M; ++i)
                ddiff[idx][i] = next.phi_prime[idx][i] - cur.phi_prime[idx][i];
        }
        const double step = x_norm_exact(diff, ddiff);
        rep.step_norms.push_back(step);
        const double ratio = prev_step > 0.0 ? step / prev_step : 0.0;
        rep.step_ratios.push_back(ratio);
        cur = std::move(next);
        done = step <= tol_X || step <= floor_X;
        if (!done && ratio >= 1.0) {
            if (++strikes >= 2) {
                std::ostringstream msg;
                msg << "solve_Lt_exterior: perturbation series is not contracting, ratio "
                    << ratio << " at t = " << t;
                throw DivergenceError(msg.str());
            }
        } else {
            strikes = 0;
        }
        prev_step = step;
    }
    rep.iterations = static_cast<int>(rep.step_norms.size());
    rep.converged = done;

    ModeField res = make_mode_field(f.grid, f.angular, params, f.K_max);
    for (int idx = 0; idx < static_cast<int>(cur.phi.coeffs.size()); ++idx) {
        if (!cur.phi.active(idx)) continue;
        const int k = AngularSet::degree_of(idx);
        const std::vector<double> lap =
            mode_laplacian(grid, cur.phi.coeffs[idx], params.N, lambda_k(params.N, k));
        const std::vector<double> d = radial_derivative(grid, cur.phi.coeffs[idx]);
        auto& o = res.profile(idx);
        for (std::size_t i = 0; i < M; ++i) {
            const double r = grid.r[i];
            const double drift = params.p * d[i] / (t * std::pow(r, params.alpha) - params.beta * r);
            const double data = f.active(idx) ? f.coeffs[idx][i] : 0.0;
            o[i] = lap[i] + drift - data;
        }
    }
    rep.residual = norms(res).norm_Y;
    rep.norm_X = x_norm_exact(cur.phi, cur.phi_prime);
    rep.phi = std::move(cur.phi);
    rep.phi_prime = std::move(cur.phi_prime);
    return rep;
}

ExteriorSolveReport solve_exterior_problem(const Params& params, const ExteriorConfig& config) {
    require_exterior(params, "solve_exterior_problem");
    if (!(config.t >= 2.0 * params.beta))
        throw DomainError("solve_exterior_problem: need t >= 2 beta for the perturbation step");
    if (config.M < 512) throw ConfigError("solve_exterior_problem: need at least 512 nodes");
    if (config.R_levels.empty())
        throw ConfigError("solve_exterior_problem: empty truncation ladder");
    if (!(config.R_levels.front() >= 2.0 * kEtaOuter))
        throw ConfigError("solve_exterior_problem: first truncation level must clear the cutoff");
    if (config.max_iter < 1) throw ConfigError("solve_exterior_problem: max_iter must be positive");
    if (!(config.tol_X > 0.0))
        throw ConfigError("solve_exterior_problem: tolerance must be positive");
    if (config.far_field_radii.empty())
        throw ConfigError("solve_exterior_problem: need at least one far-field sample radius");

    auto grid = std::make_shared<const RadialGrid>(
        make_log_grid(1.0, config.R_levels.back(), config.M));
    const int M = static_cast<int>(grid->size());
    const double h = grid->dlog;
    for (double R : config.far_field_radii)
        if (!(R > 1.0) || R > grid->r_max * (1.0 + 1e-12))
            throw ConfigError("solve_exterior_problem: far-field radius outside the grid");

    const double t = config.t;
    const int N = params.N;
    const double p = params.p;

    // Nodal cutoff and explicit-profile data; u_t by cumulative panel
    // integration of its analytic slope (machine-accurate at this spacing).
    std::vector<double> eta(M, 1.0), eta1(M, 0.0), eta2(M, 0.0);
    if (!config.eta_identity)
        for (int i = 0; i < M; ++i) {
            const double r = grid->r[i];
            eta[i] = exterior_eta(r);
            eta1[i] = exterior_eta_d1(r);
            eta2[i] = exterior_eta_d2(r);
        }
    std::vector<double> dut(M), d2ut(M), w(M);
    for (int i = 0; i < M; ++i) {
        const double r = grid->r[i];
        dut[i] = du_exterior(params, t, r);
        d2ut[i] = d2u_exterior(params, t, r);
        w[i] = dut[i] * r; // du/ds in log coordinates
    }
    const std::vector<double> ut = prefix_integral(w, h);
    std::vector<double> G0(M), lap_base(M);
    for (int i = 0; i < M; ++i) {
        const double r = grid->r[i];
        G0[i] = eta1[i] * ut[i] + eta[i] * dut[i];
        lap_base[i] = eta[i] * d2ut[i] + 2.0 * eta1[i] * dut[i] + eta2[i] * ut[i] +
                      (N - 1) * G0[i] / r;
    }

    TruncationConfig trunc;
    trunc.R_levels = config.R_levels;
    trunc.stabilization_tol = config.stabilization_tol;
    const double inner_tol = std::clamp(config.tol_X / 100.0, 1e-14, 1e-10);

    ExteriorSolveReport rep;
    const double inv_zonal = 1.0 / std::sqrt(kFourPi);
    ModeField phi = make_mode_field(grid, nullptr, params, 0);
    phi.profile(0).assign(M, 0.0);
    std::vector<std::vector<double>> prime(1, std::vector<double>(M, 0.0));
    std::vector<double> phi_d(M, 0.0);
    double prev_step = 0.0;
    if (!config.eta_identity) {
        for (int it = 0; it < config.max_iter; ++it) {
            std::vector<double> rhs(M);
            for (int i = 0; i < M; ++i) {
                const double r = grid->r[i];
                const double I1 = ut[i] * (eta2[i] + (N - 1) * eta1[i] / r) + 2.0 * eta1[i] * dut[i];
                const double I2 = power_abs(G0[i], p) - eta[i] * power_abs(dut[i], p);
                const double G = G0[i] + phi_d[i];
                const double I3 = power_abs(G, p) - power_abs(G0[i], p) -
                                  p * odd_power(G0[i], p - 1.0) * phi_d[i];
                const double I4 =
                    p * (odd_power(G0[i], p - 1.0) - odd_power(dut[i], p - 1.0)) * phi_d[i];
                rhs[i] = -(I1 + I2 + I3 + I4);
            }
            ModeField data = make_radial_field(grid, nullptr, params, std::move(rhs));
            ExteriorLinearReport lin = solve_Lt_exterior(params, t, data, trunc, 64, inner_tol);
            ModeField diff = lin.phi;
            add_scaled(diff, phi, -1.0);
            std::vector<std::vector<double>> ddiff(1, std::vector<double>(M));
            for (int i = 0; i < M; ++i) ddiff[0][i] = lin.phi_prime[0][i] - prime[0][i];
            const double step = x_norm_exact(diff, ddiff);
            rep.step_norms.push_back(step);
            if (it > 0 && prev_step > 0.0)
                rep.contraction_factor = std::max(rep.contraction_factor, step / prev_step);
            prev_step = step;
            phi = std::move(lin.phi);
            prime = std::move(lin.phi_prime);
            for (int i = 0; i < M; ++i) phi_d[i] = prime[0][i] * inv_zonal;
            rep.iterations = it + 1;
            if (step <= config.tol_X) {
                rep.converged = true;
                break;
            }
        }
    } else {
        rep.converged = true;
    }

    // Assembled solution and verification samples.
    std::vector<double> u(M), du(M);
    const std::vector<double> lap_phi_coeff = mode_laplacian(*grid, phi.coeffs[0], N, 0.0);
    for (int i = 0; i < M; ++i) {
        u[i] = eta[i] * ut[i] + phi.coeffs[0][i] * inv_zonal;
        du[i] = G0[i] + phi_d[i];
    }
    rep.boundary_sup = std::abs(u[0]);
    rep.positive = true;
    for (int i = 1; i < M; ++i)
        if (!(u[i] > 0.0)) rep.positive = false;

    const int collar_inner = static_cast<int>(std::llround(std::log(kEtaInner) / h));
    const int collar_outer = static_cast<int>(std::llround(std::log(kEtaOuter) / h));
    double residual = 0.0;
    for (int i = 0; i < M; ++i) {
        const double r = grid->r[i];
        if (r < 1.1 || r > grid->r_max / 2.0) continue;
        if (!config.eta_identity &&
            (std::abs(i - collar_inner) <= 3 || std::abs(i - collar_outer) <= 3))
            continue;
        const double res = lap_base[i] + lap_phi_coeff[i] * inv_zonal + power_abs(du[i], p);
        residual = std::max(residual, std::pow(r, params.sigma + 2.0) * std::abs(res));
    }
    rep.residual = residual;

    FarFieldReport far;
    far.target = std::pow(t, -1.0 / (p - 1.0));
    for (double R : config.far_field_radii) {
        const int i = std::clamp(static_cast<int>(std::llround(std::log(R) / h)), 0, M - 1);
        far.radii.push_back(grid->r[i]);
        far.values.push_back(std::pow(grid->r[i], N - 1) * du[i]);
        far.max_rel_deviation =
            std::max(far.max_rel_deviation, std::abs(far.values.back() - far.target) / far.target);
    }
    int last_nonpositive = -1;
    for (int i = M - 1; i >= 0; --i)
        if (du[i] <= 0.0) {
            last_nonpositive = i;
            break;
        }
    far.crossover_radius = last_nonpositive < 0 ? grid->r[0] : grid->r[std::min(last_nonpositive + 1, M - 1)];
    far.monotone_beyond = last_nonpositive < M - 1;
    rep.far_field = far;

    rep.norm_X = x_norm_exact(phi, prime);
    rep.eps_t = exterior_matching_error(params, t);
    rep.eps_hat_t = exterior_quadratic_error(params, t);
    rep.phi = std::move(phi);
    return rep;
}

double exterior_matching_error(const Params& params, double t, int n_samples) {
    require_exterior(params, "exterior_matching_error");
    if (n_samples < 2) throw ConfigError("exterior_matching_error: need at least two samples");
    const double p = params.p;
    const int N = params.N;
    double sup = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double r = std::exp(std::log(kEtaOuter) * j / (n_samples - 1));
        const double eta = exterior_eta(r);
        const double eta1 = exterior_eta_d1(r);
        const double eta2 = exterior_eta_d2(r);
        const double ut = u_exterior(params, t, r);
        const double dut = du_exterior(params, t, r);
        const double G0 = eta1 * ut + eta * dut;
        const double I1 = ut * (eta2 + (N - 1) * eta1 / r) + 2.0 * eta1 * dut;
        const double I2 = power_abs(G0, p) - eta * power_abs(dut, p);
        const double D3 = std::abs(odd_power(G0, p - 1.0) - odd_power(dut, p - 1.0));
        sup = std::max(sup, std::abs(I1) + std::abs(I2) + D3);
    }
    return sup;
}

double exterior_quadratic_error(const Params& params, double t, int n_samples) {
    require_exterior(params, "exterior_quadratic_error");
    if (n_samples < 2) throw ConfigError("exterior_quadratic_error: need at least two samples");
    if (params.p <= 2.0) return 0.0;
    const double r_hi = 100.0;
    double sup = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double r =
            kEtaInner * std::exp(std::log(r_hi / kEtaInner) * j / (n_samples - 1));
        const double G0 = exterior_eta_d1(r) * u_exterior(params, t, r) +
                          exterior_eta(r) * du_exterior(params, t, r);
        sup = std::max(sup, std::pow(r, -params.sigma) * power_abs(G0, params.p - 2.0));
    }
    return sup;
}

} // namespace singrad
