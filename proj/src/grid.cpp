#include "singrad/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singrad/errors.hpp"

namespace singrad {

namespace {

// Fornberg weight generation: weights w_j such that sum_j w_j f(x_j)
// approximates the m-th derivative of f at z, exact for polynomials of
// degree < nodes.size(). Avoids hand-transcribed stencil tables.
std::vector<double> fd_weights(double z, const double* x, std::size_t n_nodes, int order) {
    const std::size_t n = n_nodes - 1;
    const int m = order;
    std::vector<std::vector<double>> c(n_nodes, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const int mn = static_cast<int>(std::min<std::size_t>(i, m));
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) w[j] = c[j][m];
    return w;
}

std::vector<double> log_stencil_apply(const RadialGrid& grid, const std::vector<double>& a,
                                      int order, std::size_t width) {
    const std::size_t M = grid.size();
    if (a.size() != M) throw DomainError("profile length does not match grid");
    if (M < width) throw DomainError("grid too small for the requested stencil");
    // log-uniform spacing: weights depend only on the evaluation point's offset
    // inside its window, so compute them once per offset on canonical nodes
    std::vector<double> canon(width);
    for (std::size_t j = 0; j < width; ++j) canon[j] = static_cast<double>(j) * grid.dlog;
    std::vector<std::vector<double>> by_offset(width);
    std::vector<double> out(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        std::size_t start = (i >= width / 2) ? i - width / 2 : 0;
        start = std::min(start, M - width);
        const std::size_t offset = i - start;
        if (by_offset[offset].empty()) {
            by_offset[offset] = fd_weights(canon[offset], canon.data(), width, order);
        }
        const std::vector<double>& w = by_offset[offset];
        double acc = 0.0;
        for (std::size_t j = 0; j < width; ++j) acc += w[j] * a[start + j];
        out[i] = acc;
    }
    return out;
}

} // namespace

RadialGrid make_log_grid(double r_min, double r_max, int M) {
    if (!(r_min > 0.0) || !(r_min < r_max)) {
        std::ostringstream msg;
        msg << "log grid needs 0 < r_min < r_max, got [" << r_min << ", " << r_max << "]";
        throw DomainError(msg.str());
    }
    if (M < 2) throw DomainError("log grid needs at least 2 nodes");
    RadialGrid grid;
    grid.r_min = r_min;
    grid.r_max = r_max;
    grid.dlog = std::log(r_max / r_min) / (M - 1);
    grid.r.resize(M);
    const double s0 = std::log(r_min);
    for (int i = 0; i < M; ++i) grid.r[i] = std::exp(s0 + i * grid.dlog);
    grid.r.front() = r_min;
    grid.r.back() = r_max;
    grid.quad_weights.resize(M);
    for (int i = 0; i < M; ++i) {
        const double trap = (i == 0 || i == M - 1) ? 0.5 * grid.dlog : grid.dlog;
        grid.quad_weights[i] = trap * grid.r[i];
    }
    return grid;
}

std::vector<double> log_derivative(const RadialGrid& grid, const std::vector<double>& a) {
    return log_stencil_apply(grid, a, 1, 5);
}

std::vector<double> log_second_derivative(const RadialGrid& grid, const std::vector<double>& a) {
    return log_stencil_apply(grid, a, 2, 6);
}

std::vector<double> radial_derivative(const RadialGrid& grid, const std::vector<double>& a) {
    std::vector<double> d = log_derivative(grid, a);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] /= grid.r[i];
    return d;
}

std::vector<double> radial_second_derivative(const RadialGrid& grid, const std::vector<double>& a) {
    const std::vector<double> d1 = log_derivative(grid, a);
    std::vector<double> d2 = log_second_derivative(grid, a);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        d2[i] = (d2[i] - d1[i]) / (grid.r[i] * grid.r[i]);
    }
    return d2;
}

std::vector<double> mode_laplacian(const RadialGrid& grid, const std::vector<double>& a, int N,
                                   double lambda) {
    const std::vector<double> d1 = log_derivative(grid, a);
    std::vector<double> out = log_second_derivative(grid, a);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r2 = grid.r[i] * grid.r[i];
        out[i] = (out[i] + (N - 2) * d1[i] - lambda * a[i]) / r2;
    }
    return out;
}

double interpolate(const RadialGrid& grid, const std::vector<double>& a, double r) {
    const std::size_t M = grid.size();
    if (a.size() != M) throw DomainError("profile length does not match grid");
    const double tol = 1e-12 * grid.r_max;
    if (r < grid.r_min - tol || r > grid.r_max + tol) {
        std::ostringstream msg;
        msg << "interpolation radius " << r << " outside [" << grid.r_min << ", " << grid.r_max
            << "]";
        throw DomainError(msg.str());
    }
    r = std::clamp(r, grid.r_min, grid.r_max);
    if (M < 4) {
        // linear fallback for toy grids
        std::size_t i = 0;
        while (i + 2 < M && grid.r[i + 1] < r) ++i;
        const double s = std::log(r / grid.r[i]) / std::log(grid.r[i + 1] / grid.r[i]);
        return (1.0 - s) * a[i] + s * a[i + 1];
    }
    const double si = std::log(r / grid.r_min) / grid.dlog;
    std::size_t start = 0;
    if (si > 1.0) start = static_cast<std::size_t>(si) - 1;
    start = std::min(start, M - 4);
    double value = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        double basis = 1.0;
        const double sj = static_cast<double>(start + j);
        for (std::size_t l = 0; l < 4; ++l) {
            if (l == j) continue;
            const double sl = static_cast<double>(start + l);
            basis *= (si - sl) / (sj - sl);
        }
        value += basis * a[start + j];
    }
    return value;
}

} // namespace singrad
