#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "singrad/angular.hpp"
#include "singrad/errors.hpp"

using namespace singrad;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    double m8 = 0.0;
    double m9 = 0.0;
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
        total += w[i];
        m8 += w[i] * std::pow(x[i], 8);
        m9 += w[i] * std::pow(x[i], 9);
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    CHECK(m9 == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("tabulated solid harmonics are harmonic polynomials") {
    CHECK(solid_harmonic_laplacian_defect(8) <= 1e-12);
}

TEST_CASE("weights cover the sphere and the basis is orthonormal") {
    const AngularSet set = make_angular_set(8);
    CHECK(set.n_nodes() >= 26);
    double total = 0.0;
    for (const AngularNode& node : set.nodes) total += node.weight;
    CHECK(total == doctest::Approx(4.0 * M_PI).epsilon(1e-13));

    const int H = set.n_harmonics();
    double worst = 0.0;
    for (int a = 0; a < H; ++a) {
        for (int b = a; b < H; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < set.n_nodes(); ++j) {
                dot += set.nodes[j].weight * set.basis[a][j] * set.basis[b][j];
            }
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("product rule is exact for the advertised polynomial degree") {
    // integral of x^2 y^2 z^2 over S^2 = 4*pi/105, degree 6 <= 2*K for K=4
    const AngularSet set = make_angular_set(4);
    double acc = 0.0;
    for (const AngularNode& node : set.nodes) {
        const auto& d = node.dir;
        acc += node.weight * d[0] * d[0] * d[1] * d[1] * d[2] * d[2];
    }
    CHECK(acc == doctest::Approx(4.0 * M_PI / 105.0).epsilon(1e-13));
}

TEST_CASE("low-degree harmonics match their closed forms") {
    const AngularSet set = make_angular_set(4);
    const double c0 = 1.0 / std::sqrt(4.0 * M_PI);
    const double c1 = std::sqrt(3.0 / (4.0 * M_PI));
    for (std::size_t j = 0; j < set.n_nodes(); ++j) {
        const auto& d = set.nodes[j].dir;
        CHECK(set.basis[AngularSet::flat_index(0, 0)][j] == doctest::Approx(c0).epsilon(1e-12));
        CHECK(set.basis[AngularSet::flat_index(1, 0)][j] ==
              doctest::Approx(c1 * d[2]).epsilon(1e-12));
        CHECK(set.basis[AngularSet::flat_index(1, 1)][j] ==
              doctest::Approx(c1 * d[0]).epsilon(1e-12));
        CHECK(set.basis[AngularSet::flat_index(1, 2)][j] ==
              doctest::Approx(c1 * d[1]).epsilon(1e-12));
    }
}

TEST_CASE("surface gradient is tangential and completes the full gradient") {
    const AngularSet set = make_angular_set(6);
    double worst_tangent = 0.0;
    double worst_full = 0.0;
    for (int idx = 0; idx < set.n_harmonics(); ++idx) {
        const int k = AngularSet::degree_of(idx);
        for (std::size_t j = 0; j < set.n_nodes(); ++j) {
            const auto& d = set.nodes[j].dir;
            double dot = 0.0;
            double full_sq = 0.0;
            for (int axis = 0; axis < 3; ++axis) {
                dot += set.surf_grad[idx][axis][j] * d[axis];
                const double favorite =
                    set.surf_grad[idx][axis][j] + k * set.basis[idx][j] * d[axis];
                full_sq += favorite * favorite;
            }
            worst_tangent = std::max(worst_tangent, std::abs(dot));
            // the full gradient of the homogeneous extension, re-assembled from
            // tangential + radial parts, must match the polynomial gradient
            const auto grad = evaluate_harmonic_gradient(set, idx, d);
            const double poly_sq =
                grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2];
            worst_full = std::max(worst_full, std::abs(full_sq - poly_sq));
        }
    }
    CHECK(worst_tangent <= 1e-11);
    CHECK(worst_full <= 1e-10);
}

TEST_CASE("polynomial evaluation agrees with the node tables and Euler identity") {
    const AngularSet set = make_angular_set(5);
    for (int idx = 0; idx < set.n_harmonics(); ++idx) {
        for (std::size_t j = 0; j < set.n_nodes(); j += 7) {
            CHECK(evaluate_harmonic(set, idx, set.nodes[j].dir) ==
                  doctest::Approx(set.basis[idx][j]).epsilon(1e-11));
        }
    }
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::array<double, 3> dir{gauss(rng), gauss(rng), gauss(rng)};
        const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        for (double& c : dir) c /= len;
        const int idx = static_cast<int>(rng() % set.n_harmonics());
        const int k = AngularSet::degree_of(idx);
        const double v = evaluate_harmonic(set, idx, dir);
        const auto g = evaluate_harmonic_gradient(set, idx, dir);
        const double radial = g[0] * dir[0] + g[1] * dir[1] + g[2] * dir[2];
        CHECK(radial == doctest::Approx(k * v).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("committed node table matches a fresh build") {
    const AngularSet set = make_angular_set(8);
    std::ifstream table(std::string(SINGRAD_SOURCE_DIR) + "/data/angular_table_k8.csv");
    REQUIRE(table.good());
    std::string line;
    std::getline(table, line);
    CHECK(line == "index,x,y,z,weight");
    std::size_t rows = 0;
    while (std::getline(table, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const std::size_t j = std::stoul(cell);
        REQUIRE(j < set.n_nodes());
        double vals[4];
        for (double& v : vals) {
            std::getline(row, cell, ',');
            v = std::stod(cell);
        }
        for (int axis = 0; axis < 3; ++axis) {
            CHECK(vals[axis] == doctest::Approx(set.nodes[j].dir[axis]).epsilon(1e-12));
        }
        CHECK(vals[3] == doctest::Approx(set.nodes[j].weight).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == set.n_nodes());
}

TEST_CASE("degree bookkeeping") {
    CHECK(AngularSet::degree_of(0) == 0);
    CHECK(AngularSet::degree_of(1) == 1);
    CHECK(AngularSet::degree_of(3) == 1);
    CHECK(AngularSet::degree_of(4) == 2);
    CHECK(AngularSet::degree_of(80) == 8);
    CHECK(AngularSet::flat_index(8, 0) == 64);
}
