#pragma once

#include <array>
#include <vector>

namespace singrad {

/// Quadrature direction on S^2 with its surface weight; weights sum to 4*pi.
struct AngularNode {
    std::array<double, 3> dir;
    double weight;
};

/// Real spherical-harmonic basis for N=3, tabulated on a product rule:
/// Gauss-Legendre in cos(theta) times uniform azimuth, exact for polynomial
/// degree <= 2*K_max by construction. Basis functions are orthonormal in
/// L^2(S^2) under the set's own quadrature; flat index (k, m) -> k*k + m with
/// m = 0 the zonal function and odd/even m > 0 the cos/sin sectoral pairs.
/// One monomial coeff * x^ex * y^ey * z^ez of a solid harmonic.
struct Monomial {
    int ex, ey, ez;
    double coeff;
};

struct AngularSet {
    int K_max = 0;
    int n_theta = 0;
    int n_phi = 0;
    std::vector<AngularNode> nodes;
    // basis[idx][node] = psi_idx(dir_node)
    std::vector<std::vector<double>> basis;
    // surface gradient tangent to the sphere, per component
    std::vector<std::array<std::vector<double>, 3>> surf_grad;
    // normalized harmonic polynomials, for evaluation at arbitrary directions
    std::vector<std::vector<Monomial>> polys;

    int n_harmonics() const { return (K_max + 1) * (K_max + 1); }
    std::size_t n_nodes() const { return nodes.size(); }
    static int flat_index(int k, int m) { return k * k + m; }
    static int degree_of(int idx);
};

/// psi_idx at a unit direction (any direction, not only tabulated nodes).
double evaluate_harmonic(const AngularSet& set, int idx, const std::array<double, 3>& dir);

/// Full Cartesian gradient of the degree-k homogeneous extension at dir.
std::array<double, 3> evaluate_harmonic_gradient(const AngularSet& set, int idx,
                                                 const std::array<double, 3>& dir);

/// Build the tabulated set. K_max >= 0; the node count never drops below the
/// 5 x 9 product rule so sup-norms always sample >= 26 directions.
AngularSet make_angular_set(int K_max);

/// Max absolute coefficient of the polynomial Laplacian applied to every
/// tabulated solid harmonic of degree <= K_max; identically zero when the
/// recurrences are right (coefficients are exact small rationals in double).
double solid_harmonic_laplacian_defect(int K_max);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace singrad
