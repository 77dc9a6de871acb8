#include <doctest.h>

#include "singrad/errors.hpp"
#include "singrad/grid.hpp"
#include "singrad/mode_analysis.hpp"
#include "singrad/params.hpp"

#include <cmath>
#include <vector>

using namespace singrad;

namespace {

std::vector<Params> admissible_ball_sweep() {
    std::vector<Params> out;
    for (int N : {3, 4, 5, 6, 7}) {
        const double lo = static_cast<double>(N) / (N - 1);
        for (double frac : {0.15, 0.4, 0.65, 0.9})
            out.push_back(new_ball_params(N, lo + frac * (2.0 - lo)));
    }
    return out;
}

} // namespace

TEST_CASE("spherical harmonic eigenvalues") {
    CHECK(lambda_k(3, 0) == 0.0);
    CHECK(lambda_k(3, 1) == 2.0);
    CHECK(lambda_k(3, 2) == 6.0);
    CHECK(lambda_k(4, 1) == 3.0);
    CHECK(lambda_k(5, 3) == 18.0);
    CHECK_THROWS_AS(lambda_k(2, 1), DomainError);
    CHECK_THROWS_AS(lambda_k(3, -1), DomainError);
}

TEST_CASE("indicial roots for the reference ball parameters") {
    const Params P = new_ball_params(3, 1.75);
    const EulerRoots g1 = euler_roots(P, 1, RadialOperator::L0);
    CHECK(g1.gamma_plus == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(g1.gamma_minus == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));

    const EulerRoots g2 = euler_roots(P, 2, RadialOperator::L0);
    CHECK(g2.gamma_plus ==
          doctest::Approx(2.53424019497545710660227631506).epsilon(1e-14));

    const EulerRoots g0 = euler_roots(P, 0, RadialOperator::L0);
    // drift coefficient N-2-p/beta = -1/6 here, so roots {0, 1/6}
    CHECK(g0.gamma_minus == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g0.gamma_plus == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("degree-one root identities across admissible parameters") {
    for (const Params& P : admissible_ball_sweep()) {
        const EulerRoots g1 = euler_roots(P, 1, RadialOperator::L0);
        CHECK(std::abs(g1.gamma_minus + P.sigma + 1.0) < 1e-12);
        const double expected =
            ((P.N - 1) * P.p * P.p + P.p * (-2.0 * P.N + 1.0) + P.N + 1.0) /
            (P.p - 1.0);
        CHECK(g1.gamma_plus + P.sigma == doctest::Approx(expected).epsilon(1e-12));
    }
    const Params P = new_ball_params(3, 1.75);
    const EulerRoots g1 = euler_roots(P, 1, RadialOperator::L0);
    CHECK(g1.gamma_plus + P.sigma == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("roots satisfy their quadratic and order correctly") {
    for (const Params& P : admissible_ball_sweep()) {
        for (int k = 0; k <= 16; ++k) {
            for (RadialOperator op : {RadialOperator::L0, RadialOperator::Laplace}) {
                const EulerRoots g = euler_roots(P, k, op);
                const double b = (op == RadialOperator::L0)
                                     ? (P.N - 2 - P.p / P.beta)
                                     : (P.N - 2.0);
                const double lam = lambda_k(P.N, k);
                for (double gamma : {g.gamma_plus, g.gamma_minus}) {
                    const double res = gamma * gamma + b * gamma - lam;
                    const double scale = gamma * gamma + std::abs(b * gamma) + lam + 1.0;
                    CHECK(std::abs(res) < 1e-12 * scale);
                }
                CHECK(g.gamma_plus >= g.gamma_minus);
            }
        }
    }
}

TEST_CASE("plain Laplacian roots at degree one are exact integers") {
    for (int N : {3, 4, 5, 6, 7}) {
        const Params P = new_ball_params(N, 0.5 * (static_cast<double>(N) / (N - 1) + 2.0));
        const EulerRoots g = euler_roots(P, 1, RadialOperator::Laplace);
        // discriminant (N-2)^2 + 4(N-1) = N^2 is a perfect square
        CHECK(g.gamma_plus == 1.0);
        CHECK(g.gamma_minus == -(N - 1.0));
    }
}

TEST_CASE("root monotonicity and sign structure in the degree") {
    const Params P = new_ball_params(3, 1.75);
    double prev_plus = -1e300, prev_minus = 1e300;
    for (int k = 0; k <= 16; ++k) {
        const EulerRoots g = euler_roots(P, k, RadialOperator::L0);
        CHECK(g.gamma_plus > prev_plus);
        CHECK(g.gamma_minus < prev_minus);
        if (k >= 1) {
            CHECK(g.gamma_minus + P.sigma <= -1.0 + 1e-12);
            CHECK(g.gamma_plus + P.sigma > 0.0);
        }
        prev_plus = g.gamma_plus;
        prev_minus = g.gamma_minus;
    }
}

TEST_CASE("exterior weight exponent sits above the harmonic decay rate") {
    for (double eps : {0.1, 0.25, 0.5}) {
        const Params P = new_exterior_params(5, 2.0, eps);
        const EulerRoots g0 = euler_roots(P, 0, RadialOperator::Laplace);
        // k=0 harmonic tail r^(-(N-2)) decays slower than the weight r^(-sigma)
        CHECK(g0.gamma_minus == doctest::Approx(-(P.N - 2.0)).epsilon(1e-14));
        CHECK(P.sigma + g0.gamma_minus == doctest::Approx(eps).epsilon(1e-12));
    }
}

TEST_CASE("log-radius coefficients: limits and monotonicity") {
    const Params P = new_ball_params(3, 1.75);
    const double t = 7.0;

    SUBCASE("degree-one constant term tends to -11/6 at the origin") {
        const TauCoefficients tc = tau_coefficients(P, t, 1, -80.0);
        CHECK(tc.c_k == doctest::Approx(-11.0 / 6.0).epsilon(1e-12));
        CHECK(tc.g == doctest::Approx(P.N - 2 - 2.0 * P.sigma - P.p / P.beta)
                          .epsilon(1e-12));
    }

    SUBCASE("constant term tends to -lambda_k - sigma(N-2-sigma) far out") {
        const TauCoefficients tc = tau_coefficients(P, t, 1, 80.0);
        const double expected = -lambda_k(P.N, 1) - P.sigma * (P.N - 2 - P.sigma);
        CHECK(tc.c_k == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("decreasing in the degree and in tau") {
        for (double tau : {-3.0, 0.0, 2.0}) {
            for (int k = 0; k < 8; ++k) {
                CHECK(tau_coefficients(P, t, k + 1, tau).c_k <
                      tau_coefficients(P, t, k, tau).c_k);
            }
        }
        double prev = 1e300;
        for (double tau = -6.0; tau <= 6.0; tau += 0.5) {
            const double c = tau_coefficients(P, t, 1, tau).c_k;
            CHECK(c < prev);
            prev = c;
        }
    }

    CHECK_THROWS_AS(tau_coefficients(P, -1.0, 1, 0.0), DomainError);
}

TEST_CASE("homogeneous mode solutions: measured decay exponents") {
    const Params P = new_ball_params(3, 1.75);
    const RadialGrid grid = make_log_grid(1e-8, 1.0, 1024);

    SUBCASE("inward branch leaves the weighted space (k=1, t=1)") {
        const KernelDecayReport rep = kernel_decay_diagnostic(P, 1.0, 1, grid);
        CHECK(std::abs(rep.exponent_inward - rep.gamma_minus) < 1e-2);
        CHECK(rep.gamma_minus == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
        CHECK(rep.weighted_blowup);
        CHECK(std::abs(rep.exponent_outward - rep.gamma_plus) < 1e-2);
    }

    SUBCASE("pure Euler limit t=0 reproduces both exponents sharply") {
        const KernelDecayReport rep = kernel_decay_diagnostic(P, 0.0, 1, grid);
        CHECK(std::abs(rep.exponent_inward - rep.gamma_minus) < 1e-8);
        CHECK(std::abs(rep.exponent_outward - rep.gamma_plus) < 1e-8);
        CHECK(std::abs(rep.exponent_outer - rep.gamma_plus) < 1e-8);
        CHECK(rep.weighted_blowup);
    }

    SUBCASE("regular branch at k=2, t=10") {
        const KernelDecayReport rep = kernel_decay_diagnostic(P, 10.0, 2, grid);
        CHECK(std::abs(rep.exponent_outward -
                       2.53424019497545710660227631506) < 1e-2);
        CHECK(rep.weighted_blowup);
    }

    SUBCASE("k=0 inward branch stays weighted-bounded") {
        const KernelDecayReport rep = kernel_decay_diagnostic(P, 1.0, 0, grid);
        CHECK_FALSE(rep.weighted_blowup);
    }

    SUBCASE("rejections") {
        const Params E = new_exterior_params(3, 2.5, 0.5);
        CHECK_THROWS_AS(kernel_decay_diagnostic(E, 1.0, 1, grid), DomainError);
        CHECK_THROWS_AS(kernel_decay_diagnostic(P, -1.0, 1, grid), DomainError);
    }
}
