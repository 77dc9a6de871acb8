#include "singrad/mode_field.hpp"

#include <cmath>
#include <iomanip>

#include "singrad/errors.hpp"

namespace singrad {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

void require_same_grid(const ModeField& a, const ModeField& b) {
    if (a.grid == b.grid) return;
    if (a.grid && b.grid && a.grid->size() == b.grid->size() &&
        a.grid->r_min == b.grid->r_min && a.grid->r_max == b.grid->r_max) {
        return;
    }
    throw DomainError("mode fields live on different radial grids");
}

} // namespace

bool ModeField::radial_only() const {
    for (std::size_t idx = 1; idx < coeffs.size(); ++idx) {
        if (!coeffs[idx].empty()) return false;
    }
    return true;
}

std::vector<double>& ModeField::profile(int idx) {
    if (idx < 0 || idx >= static_cast<int>(coeffs.size())) {
        throw BandLimitError("mode index " + std::to_string(idx) +
                             " outside the field's K_max slots");
    }
    if (coeffs[idx].empty()) coeffs[idx].assign(grid->size(), 0.0);
    return coeffs[idx];
}

const std::vector<double>& ModeField::profile(int idx) const {
    if (idx < 0 || idx >= static_cast<int>(coeffs.size()) || coeffs[idx].empty()) {
        throw DomainError("mode slot " + std::to_string(idx) + " is not active");
    }
    return coeffs[idx];
}

ModeField make_mode_field(std::shared_ptr<const RadialGrid> grid,
                          std::shared_ptr<const AngularSet> angular, const Params& params,
                          int K_max) {
    if (!grid) throw DomainError("mode field needs a radial grid");
    if (K_max < 0) throw DomainError("mode field needs K_max >= 0");
    if (angular && K_max > angular->K_max) {
        throw BandLimitError("field K_max exceeds the angular set's exactness degree");
    }
    ModeField field;
    field.grid = std::move(grid);
    field.angular = std::move(angular);
    field.params = params;
    field.K_max = K_max;
    field.coeffs.assign(static_cast<std::size_t>(K_max + 1) * (K_max + 1), {});
    return field;
}

ModeField make_radial_field(std::shared_ptr<const RadialGrid> grid,
                            std::shared_ptr<const AngularSet> angular, const Params& params,
                            std::vector<double> values) {
    ModeField field = make_mode_field(std::move(grid), std::move(angular), params, 0);
    if (values.size() != field.grid->size()) {
        throw DomainError("radial profile length does not match the grid");
    }
    for (double& v : values) v *= std::sqrt(kFourPi);
    field.coeffs[0] = std::move(values);
    return field;
}

ModeField decompose(std::shared_ptr<const RadialGrid> grid,
                    std::shared_ptr<const AngularSet> angular, const Params& params, int K_max,
                    const std::function<double(double, const std::array<double, 3>&)>& sampler) {
    if (params.N != 3) throw DomainError("pointwise decomposition is provided for N=3 only");
    if (!angular) throw DomainError("decomposition needs an angular set");
    ModeField field = make_mode_field(grid, angular, params, K_max);
    const AngularSet& set = *field.angular;
    const std::size_t M = field.grid->size();
    const std::size_t n_nodes = set.n_nodes();
    const int H = (K_max + 1) * (K_max + 1);
    std::vector<double> row(n_nodes);
    std::vector<std::vector<double>> acc(H, std::vector<double>(M, 0.0));
    for (std::size_t i = 0; i < M; ++i) {
        const double r = field.grid->r[i];
        for (std::size_t j = 0; j < n_nodes; ++j) {
            row[j] = set.nodes[j].weight * sampler(r, set.nodes[j].dir);
        }
        for (int idx = 0; idx < H; ++idx) {
            double a = 0.0;
            const std::vector<double>& psi = set.basis[idx];
            for (std::size_t j = 0; j < n_nodes; ++j) a += psi[j] * row[j];
            acc[idx][i] = a;
        }
    }
    field.coeffs.assign(acc.begin(), acc.end());
    return field;
}

ModeField decompose_nodal(std::shared_ptr<const RadialGrid> grid,
                          std::shared_ptr<const AngularSet> angular, const Params& params,
                          int K_max, const std::vector<std::vector<double>>& values) {
    if (params.N != 3) throw DomainError("pointwise decomposition is provided for N=3 only");
    if (!angular) throw DomainError("decomposition needs an angular set");
    ModeField field = make_mode_field(grid, angular, params, K_max);
    const AngularSet& set = *field.angular;
    const std::size_t M = field.grid->size();
    const std::size_t n_nodes = set.n_nodes();
    if (values.size() != M) throw DomainError("decompose_nodal: row count mismatch");
    const int H = (K_max + 1) * (K_max + 1);
    std::vector<double> row(n_nodes);
    std::vector<std::vector<double>> acc(H, std::vector<double>(M, 0.0));
    for (std::size_t i = 0; i < M; ++i) {
        if (values[i].size() != n_nodes)
            throw DomainError("decompose_nodal: column count mismatch");
        for (std::size_t j = 0; j < n_nodes; ++j)
            row[j] = set.nodes[j].weight * values[i][j];
        for (int idx = 0; idx < H; ++idx) {
            double a = 0.0;
            const std::vector<double>& psi = set.basis[idx];
            for (std::size_t j = 0; j < n_nodes; ++j) a += psi[j] * row[j];
            acc[idx][i] = a;
        }
    }
    field.coeffs.assign(acc.begin(), acc.end());
    return field;
}

std::vector<double> synthesize(const ModeField& field, const std::array<double, 3>& dir) {
    const std::size_t M = field.n_radial();
    std::vector<double> out(M, 0.0);
    if (field.radial_only()) {
        if (field.active(0)) {
            const double scale = 1.0 / std::sqrt(kFourPi);
            for (std::size_t i = 0; i < M; ++i) out[i] = field.coeffs[0][i] * scale;
        }
        return out;
    }
    if (!field.angular) throw DomainError("pointwise synthesis needs an angular set");
    if (field.params.N != 3) throw DomainError("pointwise synthesis is provided for N=3 only");
    const AngularSet& set = *field.angular;
    for (std::size_t idx = 0; idx < field.coeffs.size(); ++idx) {
        if (field.coeffs[idx].empty()) continue;
        const double psi = evaluate_harmonic(set, static_cast<int>(idx), dir);
        for (std::size_t i = 0; i < M; ++i) out[i] += field.coeffs[idx][i] * psi;
    }
    return out;
}

double value_at(const ModeField& field, std::size_t i, std::size_t j) {
    if (field.radial_only()) {
        return field.active(0) ? field.coeffs[0][i] / std::sqrt(kFourPi) : 0.0;
    }
    if (!field.angular) throw DomainError("pointwise evaluation needs an angular set");
    const AngularSet& set = *field.angular;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < field.coeffs.size(); ++idx) {
        if (field.coeffs[idx].empty()) continue;
        acc += field.coeffs[idx][i] * set.basis[idx][j];
    }
    return acc;
}

std::vector<std::vector<double>> radial_derivatives(const ModeField& field) {
    std::vector<std::vector<double>> out(field.coeffs.size());
    for (std::size_t idx = 0; idx < field.coeffs.size(); ++idx) {
        if (field.coeffs[idx].empty()) continue;
        out[idx] = radial_derivative(*field.grid, field.coeffs[idx]);
    }
    return out;
}

std::array<double, 3> gradient_at(const ModeField& field,
                                  const std::vector<std::vector<double>>& derivs,
                                  std::size_t i, std::size_t j) {
    if (!field.angular) throw DomainError("pointwise gradient needs an angular set");
    const AngularSet& set = *field.angular;
    const double r = field.grid->r[i];
    std::array<double, 3> g = {0.0, 0.0, 0.0};
    for (std::size_t idx = 0; idx < field.coeffs.size(); ++idx) {
        if (field.coeffs[idx].empty()) continue;
        const double ar = field.coeffs[idx][i] / r;
        const double da = derivs[idx][i];
        const double psi = set.basis[idx][j];
        for (int axis = 0; axis < 3; ++axis) {
            g[axis] += da * psi * set.nodes[j].dir[axis] + ar * set.surf_grad[idx][axis][j];
        }
    }
    return g;
}

double gradient_sq_at(const ModeField& field, const std::vector<std::vector<double>>& derivs,
                      std::size_t i, std::size_t j) {
    if (field.radial_only()) {
        return field.active(0) ? derivs[0][i] * derivs[0][i] / kFourPi : 0.0;
    }
    const std::array<double, 3> g = gradient_at(field, derivs, i, j);
    return g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
}

double mode_gradient_sq(const ModeField& field, std::size_t i) {
    const std::vector<std::vector<double>> derivs = radial_derivatives(field);
    if (field.radial_only()) return gradient_sq_at(field, derivs, i, 0);
    double sup = 0.0;
    for (std::size_t j = 0; j < field.angular->n_nodes(); ++j) {
        sup = std::max(sup, gradient_sq_at(field, derivs, i, j));
    }
    return sup;
}

WeightedNormReport norms(const ModeField& field) {
    WeightedNormReport report;
    const std::vector<std::vector<double>> derivs = radial_derivatives(field);
    const std::size_t M = field.n_radial();
    const bool radial = field.radial_only();
    const std::size_t n_nodes = radial ? 1 : field.angular->n_nodes();
    const double sigma = field.params.sigma;
    const bool keep_zero_order = field.params.regime == Regime::Ball;
    for (std::size_t i = 0; i < M; ++i) {
        const double r = field.grid->r[i];
        const double w0 = std::pow(r, sigma);
        const double w1 = std::pow(r, sigma + 1.0);
        const double w2 = std::pow(r, sigma + 2.0);
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const double v = std::abs(value_at(field, i, j));
            const double g = std::sqrt(gradient_sq_at(field, derivs, i, j));
            const double x_here = (keep_zero_order ? w0 * v : 0.0) + w1 * g;
            report.sup_zero_order = std::max(report.sup_zero_order, w0 * v);
            report.sup_gradient = std::max(report.sup_gradient, w1 * g);
            if (x_here > report.norm_X) {
                report.norm_X = x_here;
                report.argmax_r_X = r;
            }
            if (w2 * v > report.norm_Y) {
                report.norm_Y = w2 * v;
                report.argmax_r_Y = r;
            }
        }
    }
    return report;
}

double diff_norm_X(const ModeField& a, const ModeField& b) {
    require_same_grid(a, b);
    ModeField d = a;
    add_scaled(d, b, -1.0);
    return norms(d).norm_X;
}

void add_scaled(ModeField& y, const ModeField& x, double c) {
    require_same_grid(y, x);
    for (std::size_t idx = 0; idx < x.coeffs.size(); ++idx) {
        if (x.coeffs[idx].empty()) continue;
        std::vector<double>& target = y.profile(static_cast<int>(idx));
        for (std::size_t i = 0; i < target.size(); ++i) target[i] += c * x.coeffs[idx][i];
    }
}

void write_mode_field_csv(const ModeField& field, std::ostream& out) {
    out << "k,m,r,a\n" << std::setprecision(15);
    for (std::size_t idx = 0; idx < field.coeffs.size(); ++idx) {
        if (field.coeffs[idx].empty()) continue;
        const int k = AngularSet::degree_of(static_cast<int>(idx));
        const int m_index = static_cast<int>(idx) - k * k;
        const int m = m_index == 0 ? 0 : (m_index % 2 == 1 ? (m_index + 1) / 2 : -m_index / 2);
        for (std::size_t i = 0; i < field.n_radial(); ++i) {
            out << k << ',' << m << ',' << field.grid->r[i] << ',' << field.coeffs[idx][i]
                << '\n';
        }
    }
}

} // namespace singrad
