#include "singrad/angular.hpp"

#include <cmath>
#include <map>

#include "singrad/errors.hpp"

namespace singrad {

namespace {

// Trivariate polynomial in (x, y, z), sparse map from exponent triples.
// Only used while building the tabulated set; evaluation work is done once.
struct TriPoly {
    std::map<std::array<int, 3>, double> terms;

    void add(const std::array<int, 3>& e, double c) {
        if (c == 0.0) return;
        terms[e] += c;
        if (terms[e] == 0.0) terms.erase(e);
    }
};

TriPoly scaled(const TriPoly& a, double c) {
    TriPoly out;
    for (const auto& [e, v] : a.terms) out.add(e, c * v);
    return out;
}

TriPoly sum(const TriPoly& a, const TriPoly& b) {
    TriPoly out = a;
    for (const auto& [e, v] : b.terms) out.add(e, v);
    return out;
}

TriPoly shift(const TriPoly& a, int dx, int dy, int dz, double c) {
    TriPoly out;
    for (const auto& [e, v] : a.terms) out.add({e[0] + dx, e[1] + dy, e[2] + dz}, c * v);
    return out;
}

// multiply by x^2 + y^2 + z^2
TriPoly times_r2(const TriPoly& a) {
    return sum(sum(shift(a, 2, 0, 0, 1.0), shift(a, 0, 2, 0, 1.0)), shift(a, 0, 0, 2, 1.0));
}

TriPoly derivative(const TriPoly& a, int axis) {
    TriPoly out;
    for (const auto& [e, v] : a.terms) {
        if (e[axis] == 0) continue;
        std::array<int, 3> d = e;
        d[axis] -= 1;
        out.add(d, v * e[axis]);
    }
    return out;
}

TriPoly laplacian(const TriPoly& a) {
    TriPoly out;
    for (int axis = 0; axis < 3; ++axis) out = sum(out, derivative(derivative(a, axis), axis));
    return out;
}

double eval(const TriPoly& a, const std::array<double, 3>& x) {
    double acc = 0.0;
    for (const auto& [e, v] : a.terms) {
        double term = v;
        for (int axis = 0; axis < 3; ++axis) {
            for (int j = 0; j < e[axis]; ++j) term *= x[axis];
        }
        acc += term;
    }
    return acc;
}

double max_abs_coeff(const TriPoly& a) {
    double m = 0.0;
    for (const auto& [e, v] : a.terms) m = std::max(m, std::abs(v));
    return m;
}

// Real regular solid harmonics of degree <= K via the associated-Legendre
// ladder: sectoral C_ll = (2l-1)(x C - y S), S_ll = (2l-1)(x S + y C), then
// (l-m) R_lm = (2l-1) z R_{l-1,m} - (l-1+m) r^2 R_{l-2,m}. Ordering inside a
// degree: zonal first, then (cos, sin) pairs of increasing order.
std::vector<TriPoly> build_solid_harmonics(int K) {
    // cc[l][m], ss[l][m], m <= l
    std::vector<std::vector<TriPoly>> cc(K + 1), ss(K + 1);
    for (int l = 0; l <= K; ++l) {
        cc[l].resize(l + 1);
        ss[l].resize(l + 1);
    }
    cc[0][0].add({0, 0, 0}, 1.0);
    for (int l = 1; l <= K; ++l) {
        const double f = 2.0 * l - 1.0;
        cc[l][l] = sum(shift(cc[l - 1][l - 1], 1, 0, 0, f), shift(ss[l - 1][l - 1], 0, 1, 0, -f));
        ss[l][l] = sum(shift(ss[l - 1][l - 1], 1, 0, 0, f), shift(cc[l - 1][l - 1], 0, 1, 0, f));
        for (int m = 0; m < l; ++m) {
            for (auto* fam : {&cc, &ss}) {
                if (fam == &ss && m == 0) continue;
                TriPoly up = shift((*fam)[l - 1][m], 0, 0, 1, f);
                if (l - 2 >= m) {
                    up = sum(up, scaled(times_r2((*fam)[l - 2][m]), -(l - 1.0 + m)));
                }
                (*fam)[l][m] = scaled(up, 1.0 / (l - m));
            }
        }
    }
    std::vector<TriPoly> flat((K + 1) * (K + 1));
    for (int l = 0; l <= K; ++l) {
        flat[AngularSet::flat_index(l, 0)] = cc[l][0];
        for (int m = 1; m <= l; ++m) {
            flat[AngularSet::flat_index(l, 2 * m - 1)] = cc[l][m];
            flat[AngularSet::flat_index(l, 2 * m)] = ss[l][m];
        }
    }
    return flat;
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw DomainError("gauss_legendre needs n >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            if (n == 1) p1 = x; // P_1
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double step = pn / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

int AngularSet::degree_of(int idx) {
    int k = static_cast<int>(std::sqrt(static_cast<double>(idx)));
    while (k * k > idx) --k;
    while ((k + 1) * (k + 1) <= idx) ++k;
    return k;
}

AngularSet make_angular_set(int K_max) {
    if (K_max < 0) throw DomainError("make_angular_set needs K_max >= 0");
    AngularSet set;
    set.K_max = K_max;
    const int base = std::max(K_max, 4);
    set.n_theta = base + 1;
    set.n_phi = 2 * base + 1;

    std::vector<double> u, wu;
    gauss_legendre(set.n_theta, u, wu);
    const double wphi = 2.0 * M_PI / set.n_phi;
    set.nodes.reserve(static_cast<std::size_t>(set.n_theta) * set.n_phi);
    for (int i = 0; i < set.n_theta; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
        for (int j = 0; j < set.n_phi; ++j) {
            const double phi = wphi * j;
            set.nodes.push_back(
                AngularNode{{st * std::cos(phi), st * std::sin(phi), u[i]}, wu[i] * wphi});
        }
    }

    const std::vector<TriPoly> polys = build_solid_harmonics(K_max);
    const int H = set.n_harmonics();
    const std::size_t n_nodes = set.nodes.size();
    set.basis.assign(H, std::vector<double>(n_nodes, 0.0));
    set.surf_grad.assign(H, {std::vector<double>(n_nodes, 0.0), std::vector<double>(n_nodes, 0.0),
                             std::vector<double>(n_nodes, 0.0)});
    set.polys.resize(H);
    for (int idx = 0; idx < H; ++idx) {
        const int degree = AngularSet::degree_of(idx);
        const TriPoly& poly = polys[idx];
        const TriPoly gx = derivative(poly, 0);
        const TriPoly gy = derivative(poly, 1);
        const TriPoly gz = derivative(poly, 2);
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const double v = eval(poly, set.nodes[j].dir);
            set.basis[idx][j] = v;
            norm_sq += set.nodes[j].weight * v * v;
        }
        const double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const auto& dir = set.nodes[j].dir;
            const double v = set.basis[idx][j];
            const double grad[3] = {eval(gx, dir), eval(gy, dir), eval(gz, dir)};
            for (int axis = 0; axis < 3; ++axis) {
                // tangential part of the full gradient on |x| = 1
                set.surf_grad[idx][axis][j] = (grad[axis] - degree * v * dir[axis]) * inv_norm;
            }
            set.basis[idx][j] = v * inv_norm;
        }
        for (const auto& [e, c] : poly.terms) {
            set.polys[idx].push_back(Monomial{e[0], e[1], e[2], c * inv_norm});
        }
    }
    return set;
}

double evaluate_harmonic(const AngularSet& set, int idx, const std::array<double, 3>& dir) {
    if (idx < 0 || idx >= static_cast<int>(set.polys.size())) {
        throw DomainError("harmonic index outside the tabulated set");
    }
    double acc = 0.0;
    for (const Monomial& m : set.polys[idx]) {
        double term = m.coeff;
        for (int j = 0; j < m.ex; ++j) term *= dir[0];
        for (int j = 0; j < m.ey; ++j) term *= dir[1];
        for (int j = 0; j < m.ez; ++j) term *= dir[2];
        acc += term;
    }
    return acc;
}

std::array<double, 3> evaluate_harmonic_gradient(const AngularSet& set, int idx,
                                                 const std::array<double, 3>& dir) {
    if (idx < 0 || idx >= static_cast<int>(set.polys.size())) {
        throw DomainError("harmonic index outside the tabulated set");
    }
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (const Monomial& m : set.polys[idx]) {
        const int e[3] = {m.ex, m.ey, m.ez};
        for (int axis = 0; axis < 3; ++axis) {
            if (e[axis] == 0) continue;
            double term = m.coeff * e[axis];
            for (int j = 0; j < e[0] - (axis == 0 ? 1 : 0); ++j) term *= dir[0];
            for (int j = 0; j < e[1] - (axis == 1 ? 1 : 0); ++j) term *= dir[1];
            for (int j = 0; j < e[2] - (axis == 2 ? 1 : 0); ++j) term *= dir[2];
            g[axis] += term;
        }
    }
    return g;
}

double solid_harmonic_laplacian_defect(int K_max) {
    const std::vector<TriPoly> polys = build_solid_harmonics(K_max);
    double worst = 0.0;
    for (const TriPoly& poly : polys) {
        const double scale = std::max(1.0, max_abs_coeff(poly));
        worst = std::max(worst, max_abs_coeff(laplacian(poly)) / scale);
    }
    return worst;
}

} // namespace singrad
