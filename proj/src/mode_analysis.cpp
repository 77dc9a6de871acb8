#include "singrad/mode_analysis.hpp"

#include "singrad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace singrad {

double lambda_k(int N, int k) {
    if (N < 3) throw DomainError("lambda_k: N must be >= 3");
    if (k < 0) throw DomainError("lambda_k: k must be >= 0");
    return static_cast<double>(k) * (k + N - 2);
}

EulerRoots euler_roots(const Params& params, int k, RadialOperator op) {
    const double lambda = lambda_k(params.N, k);
    // gamma^2 + b gamma - lambda = 0
    const double b = (op == RadialOperator::L0)
                         ? (params.N - 2 - params.p / params.beta)
                         : (params.N - 2.0);
    const double disc = b * b + 4.0 * lambda;
    const double s = std::sqrt(disc);
    EulerRoots roots;
    roots.k = k;
    roots.op = op;
    // evaluate the larger-magnitude root first, recover the other from the
    // product -lambda to avoid cancellation
    if (b >= 0.0) {
        roots.gamma_minus = -0.5 * (b + s);
        roots.gamma_plus = (roots.gamma_minus != 0.0) ? -lambda / roots.gamma_minus : 0.0;
    } else {
        roots.gamma_plus = 0.5 * (s - b);
        roots.gamma_minus = (roots.gamma_plus != 0.0) ? -lambda / roots.gamma_plus : 0.0;
    }
    return roots;
}

TauCoefficients tau_coefficients(const Params& params, double t, int k, double tau) {
    if (t < 0.0) throw DomainError("tau_coefficients: t must be >= 0");
    const double lambda = lambda_k(params.N, k);
    const double denom = params.beta + t * std::exp((params.alpha - 1.0) * tau);
    const double drift = params.p / denom;
    TauCoefficients out;
    out.g = params.N - 2 - 2.0 * params.sigma - drift;
    out.c_k = -lambda + params.sigma * drift -
              params.sigma * (params.N - 2 - params.sigma);
    return out;
}

namespace {

// homogeneous mode ODE in s = ln r:  A_ss + c(s) A_s - lambda A = 0,
// c(s) = (N-2) - p / (beta + t e^((alpha-1)s))
struct ModeOde {
    double N, p, alpha, beta, t, lambda;

    double drift(double s) const {
        return (N - 2.0) - p / (beta + t * std::exp((alpha - 1.0) * s));
    }

    void rhs(double s, double A, double B, double& dA, double& dB) const {
        dA = B;
        dB = -drift(s) * B + lambda * A;
    }
};

// integrates (A, A_s) with RK4 from the seed point, landing exactly on each
// record point (sorted along the direction of travel) and logging ln|A| there
std::vector<double> integrate_log_amplitude(const ModeOde& ode, double s0,
                                            double A0, double B0,
                                            const std::vector<double>& record_at) {
    std::vector<double> out(record_at.size(),
                            -std::numeric_limits<double>::infinity());
    double s = s0, A = A0, B = B0;
    for (std::size_t idx = 0; idx < record_at.size(); ++idx) {
        const double target = record_at[idx];
        const double seg = target - s;
        if (std::abs(seg) > 0.0) {
            const int n_steps =
                std::max(1, static_cast<int>(std::ceil(std::abs(seg) / 0.005)));
            const double h = seg / n_steps;
            for (int step = 0; step < n_steps; ++step) {
                double k1A, k1B, k2A, k2B, k3A, k3B, k4A, k4B;
                ode.rhs(s, A, B, k1A, k1B);
                ode.rhs(s + 0.5 * h, A + 0.5 * h * k1A, B + 0.5 * h * k1B, k2A, k2B);
                ode.rhs(s + 0.5 * h, A + 0.5 * h * k2A, B + 0.5 * h * k2B, k3A, k3B);
                ode.rhs(s + h, A + h * k3A, B + h * k3B, k4A, k4B);
                A += (h / 6.0) * (k1A + 2.0 * k2A + 2.0 * k3A + k4A);
                B += (h / 6.0) * (k1B + 2.0 * k2B + 2.0 * k3B + k4B);
                s += h;
            }
            s = target;
        }
        if (A != 0.0) out[idx] = std::log(std::abs(A));
    }
    return out;
}

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || x.size() != y.size())
        throw DomainError("fit_slope: need at least two samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("fit_slope: degenerate abscissae");
    return sxy / sxx;
}

} // namespace

KernelDecayReport kernel_decay_diagnostic(const Params& params, double t, int k,
                                          const RadialGrid& grid) {
    if (params.regime != Regime::Ball)
        throw DomainError("kernel_decay_diagnostic: ball regime only");
    if (t < 0.0) throw DomainError("kernel_decay_diagnostic: t must be >= 0");
    if (grid.r_max > 1.0 + 1e-12 || grid.r_min <= 0.0)
        throw DomainError("kernel_decay_diagnostic: grid must lie in (0, 1]");

    const double lambda = lambda_k(params.N, k);
    ModeOde ode{static_cast<double>(params.N), params.p, params.alpha,
                params.beta, t, lambda};
    const EulerRoots roots = euler_roots(params, k, RadialOperator::L0);

    const double s_min = std::log(grid.r_min);
    const double s_max = std::log(grid.r_max);
    const double decade = std::log(10.0);

    // record points: grid nodes restricted to the fit windows
    std::vector<double> s_nodes(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s_nodes[i] = std::log(grid.r[i]);

    auto window = [&](double lo, double hi) {
        std::vector<double> w;
        for (double s : s_nodes)
            if (s >= lo - 1e-12 && s <= hi + 1e-12) w.push_back(s);
        return w;
    };
    const std::vector<double> inner_win = window(s_min, s_min + decade);
    const std::vector<double> outer_win = window(s_max - decade, s_max);

    KernelDecayReport report;
    report.gamma_plus = roots.gamma_plus;
    report.gamma_minus = roots.gamma_minus;

    // inward sweep: a(1) = 0, a'(1) = -1 seed, descending record points
    {
        std::vector<double> rec(inner_win.rbegin(), inner_win.rend());
        std::vector<double> logs =
            integrate_log_amplitude(ode, s_max, 0.0, -1.0, rec);
        std::reverse(logs.begin(), logs.end());
        std::vector<double> xs(inner_win), ys(logs);
        report.exponent_inward = fit_slope(xs, ys);
        // growth of r^sigma |a| toward the origin along this branch
        const double w_top = params.sigma * xs.back() + ys.back();
        const double w_bot = params.sigma * xs.front() + ys.front();
        const double rate = (w_bot - w_top) / (xs.back() - xs.front());
        report.weighted_blowup = rate >= 0.5;
    }

    // outward sweep: seeded on the regular branch at r_min
    {
        std::vector<double> rec = inner_win;
        rec.insert(rec.end(), outer_win.begin(), outer_win.end());
        std::vector<double> logs =
            integrate_log_amplitude(ode, s_min, 1.0, roots.gamma_plus, rec);
        const std::size_t n_in = inner_win.size();
        std::vector<double> ys_in(logs.begin(), logs.begin() + n_in);
        std::vector<double> ys_out(logs.begin() + n_in, logs.end());
        report.exponent_outward = fit_slope(inner_win, ys_in);
        report.exponent_outer = fit_slope(outer_win, ys_out);
    }

    return report;
}

} // namespace singrad
