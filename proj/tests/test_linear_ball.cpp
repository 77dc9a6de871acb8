#include <doctest.h>

#include "singrad/errors.hpp"
#include "singrad/linear_ball.hpp"
#include "singrad/mode_analysis.hpp"
#include "singrad/quadrature.hpp"
#include "singrad/radial_profiles.hpp"
#include "singrad/tridiag.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

using namespace singrad;

namespace {

const Params kBall = new_ball_params(3, 1.75);

// degree-zero operator applied to an analytic profile
double mode0_op(const Params& P, double t, double r, double d1, double d2) {
    return -d2 - (P.N - 1) * d1 / r +
           P.p * d1 / (P.beta * r + t * std::pow(r, P.alpha));
}

} // namespace

TEST_CASE("tridiagonal elimination") {
    SUBCASE("known 3x3 system") {
        Tridiag sys;
        sys.lower = {0.0, 1.0, 2.0};
        sys.diag = {4.0, 5.0, 6.0};
        sys.upper = {1.0, 1.0, 0.0};
        // x = (1, -2, 3)
        sys.rhs = {4.0 * 1 + 1.0 * -2, 1.0 * 1 + 5.0 * -2 + 1.0 * 3,
                   2.0 * -2 + 6.0 * 3};
        const std::vector<double> x = solve_tridiag(sys);
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-13));
        CHECK(x[2] == doctest::Approx(3.0).epsilon(1e-13));
    }

    SUBCASE("random diagonally dominant system solves to small residual") {
        std::mt19937_64 rng(91);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        const std::size_t n = 50;
        Tridiag sys;
        sys.lower.assign(n, 0.0);
        sys.diag.assign(n, 0.0);
        sys.upper.assign(n, 0.0);
        sys.rhs.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) sys.lower[i] = uni(rng);
            if (i + 1 < n) sys.upper[i] = uni(rng);
            sys.diag[i] = 3.0 + uni(rng);
            sys.rhs[i] = uni(rng);
        }
        const Tridiag keep = sys;
        const std::vector<double> x = solve_tridiag(sys);
        for (std::size_t i = 0; i < n; ++i) {
            double lhs = keep.diag[i] * x[i];
            if (i > 0) lhs += keep.lower[i] * x[i - 1];
            if (i + 1 < n) lhs += keep.upper[i] * x[i + 1];
            CHECK(lhs == doctest::Approx(keep.rhs[i]).epsilon(1e-12));
        }
    }

    SUBCASE("rank-deficient system throws") {
        Tridiag sys;
        sys.lower = {0.0, 1.0};
        sys.diag = {1.0, 1.0};
        sys.upper = {1.0, 0.0};
        sys.rhs = {1.0, 1.0};
        CHECK_THROWS_AS(solve_tridiag(sys), SingularSystemError);
    }
}

TEST_CASE("integrating factor of the degree-zero operator") {
    SUBCASE("normalized at the boundary") {
        for (double t : {0.0, 1.0, 37.0, 1e4})
            CHECK(mu_t(kBall, t, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("drift-free limit is the pure power") {
        // exponent N-1-p(alpha-1)/(p-1) = sigma - alpha + 2 = 5/6 here
        for (double r : {1e-5, 1e-2, 0.3, 0.9})
            CHECK(mu_t(kBall, 0.0, r) ==
                  doctest::Approx(std::pow(r, 5.0 / 6.0)).epsilon(1e-13));
    }

    SUBCASE("log-derivative matches the drift it integrates") {
        // mu'/mu must equal (N-1)/r - p/(beta r + t r^alpha)
        const double t = 12.0;
        for (double r : {1e-4, 1e-2, 0.2, 0.8}) {
            const double h = r * 1e-6;
            const double dlogmu =
                (std::log(mu_t(kBall, t, r + h)) - std::log(mu_t(kBall, t, r - h))) /
                (2.0 * h);
            const double expected =
                (kBall.N - 1) / r -
                kBall.p / (kBall.beta * r + t * std::pow(r, kBall.alpha));
            CHECK(dlogmu == doctest::Approx(expected).epsilon(1e-7));
        }
    }

    SUBCASE("rejections") {
        CHECK_THROWS_AS(mu_t(kBall, -1.0, 0.5), DomainError);
        CHECK_THROWS_AS(mu_t(kBall, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(mu_t(new_exterior_params(3, 2.5, 0.5), 1.0, 0.5), DomainError);
    }
}

TEST_CASE("degree-zero solve recovers a manufactured solution") {
    // a*'(r) = (r - R) e^{-r} vanishes at the anchor R, a*(1) = 0
    auto run = [](double t, double r_min, int M, double tol) {
        const double R = std::pow(t, -1.0 / (kBall.alpha - 1.0));
        auto a_star = [R](double r) {
            return (2.0 - R) * std::exp(-1.0) - (r + 1.0 - R) * std::exp(-r);
        };
        auto d1 = [R](double r) { return (r - R) * std::exp(-r); };
        auto d2 = [R](double r) { return (1.0 - r + R) * std::exp(-r); };
        auto b = [&](double r) { return mode0_op(kBall, t, r, d1(r), d2(r)); };

        auto grid = std::make_shared<const RadialGrid>(make_log_grid(r_min, 1.0, M));
        const Mode0Solution sol = solve_mode0(kBall, t, b, grid);
        CHECK(sol.anchor_radius == doctest::Approx(R).epsilon(1e-14));
        double worst_a = 0.0, worst_d = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            worst_a = std::max(worst_a, std::abs(sol.a[i] - a_star(grid->r[i])));
            worst_d = std::max(worst_d, std::abs(sol.a_prime[i] - d1(grid->r[i])));
        }
        CHECK(worst_a < tol);
        CHECK(worst_d < tol);
    };

    SUBCASE("anchor inside the grid") { run(100.0, 1e-6, 2048, 1e-8); }
    SUBCASE("anchor far below the grid") { run(1e6, 1e-6, 2048, 1e-8); }
}

TEST_CASE("degree-zero solve: weighted data invariants") {
    auto b = [](double r) { return std::pow(r, -kBall.sigma - 2.0); };

    SUBCASE("gradient bound for unit-weighted data") {
        // closed-form inner constant dominates the measured outer constant
        CHECK(mode0_gradient_bound(kBall) ==
              doctest::Approx(6.58683945275937557).epsilon(1e-12));
        for (double t : {1e2, 1e4}) {
            auto grid =
                std::make_shared<const RadialGrid>(make_log_grid(1e-10, 1.0, 2048));
            const Mode0Solution sol = solve_mode0(kBall, t, b, grid);
            CHECK(sol.sup_weighted_prime <= mode0_gradient_bound(kBall));
            CHECK(sol.sup_weighted_prime > 0.1);
        }
    }

    SUBCASE("discrete residual against the mode operator") {
        auto grid = std::make_shared<const RadialGrid>(make_log_grid(1e-8, 1.0, 2048));
        const Mode0Solution sol = solve_mode0(kBall, 1e2, b, grid);
        std::vector<double> b_nodes(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) b_nodes[i] = b(grid->r[i]);
        CHECK(mode_residual(kBall, 1e2, 0, *grid, sol.a, b_nodes) < 1e-6);
    }

    SUBCASE("solution scales linearly with the data") {
        auto grid = std::make_shared<const RadialGrid>(make_log_grid(1e-6, 1.0, 512));
        const Mode0Solution one = solve_mode0(kBall, 1e3, b, grid);
        auto b10 = [&](double r) { return 10.0 * b(r); };
        const Mode0Solution ten = solve_mode0(kBall, 1e3, b10, grid);
        for (std::size_t i = 0; i < grid->size(); i += 37)
            CHECK(ten.a[i] == doctest::Approx(10.0 * one.a[i]).epsilon(1e-12));
    }

    SUBCASE("rejections") {
        auto grid = std::make_shared<const RadialGrid>(make_log_grid(1e-6, 1.0, 64));
        CHECK_THROWS_AS(solve_mode0(kBall, 0.5, b, grid), DomainError);
        auto inner = std::make_shared<const RadialGrid>(make_log_grid(1e-6, 0.5, 64));
        CHECK_THROWS_AS(solve_mode0(kBall, 10.0, b, inner), DomainError);
    }
}

TEST_CASE("kernel profile annihilated by the degree-zero operator") {
    const double t = 1.0;
    const RadialGrid grid = make_log_grid(1e-6, 1.0, 2048);
    std::vector<double> psi(grid.size()), zero(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = psi_t(kBall, t, grid.r[i]);
    CHECK(mode_residual(kBall, t, 0, grid, psi, zero) < 1e-4);
}

TEST_CASE("higher-mode collocation recovers a manufactured solution") {
    const double t = 10.0;

    auto solve_error = [&](int k, int M) {
        const double gp = euler_roots(kBall, k, RadialOperator::L0).gamma_plus;
        const double lam = lambda_k(kBall.N, k);
        const RadialGrid grid = make_log_grid(1e-6, 1.0, M);
        std::vector<double> b(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.r[i];
            const double a = std::pow(r, gp) * (1.0 - r);
            const double d1 = gp * std::pow(r, gp - 1.0) * (1.0 - r) - std::pow(r, gp);
            const double d2 = gp * (gp - 1.0) * std::pow(r, gp - 2.0) * (1.0 - r) -
                              2.0 * gp * std::pow(r, gp - 1.0);
            b[i] = -d2 - (kBall.N - 1) * d1 / r + lam * a / (r * r) +
                   kBall.p * d1 / (kBall.beta * r + t * std::pow(r, kBall.alpha));
        }
        const std::vector<double> A = solve_modek(kBall, t, k, b, grid);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double exact = std::pow(grid.r[i], gp) * (1.0 - grid.r[i]);
            worst = std::max(worst, std::abs(A[i] - exact));
            scale = std::max(scale, std::abs(exact));
        }
        return worst / scale;
    };

    SUBCASE("accuracy at moderate resolution") {
        CHECK(solve_error(1, 4097) < 1e-4);
        CHECK(solve_error(2, 4097) < 1e-4);
        CHECK(solve_error(4, 4097) < 1e-4);
    }

    SUBCASE("second-order convergence under refinement") {
        const double coarse = solve_error(1, 1025);
        const double fine = solve_error(1, 2049);
        CHECK(coarse / fine > 2.5);
        CHECK(coarse / fine < 6.0);
    }

    SUBCASE("rejections") {
        const RadialGrid grid = make_log_grid(1e-6, 1.0, 64);
        std::vector<double> b(grid.size(), 1.0);
        CHECK_THROWS_AS(solve_modek(kBall, t, 0, b, grid), DomainError);
        CHECK_THROWS_AS(solve_modek(kBall, -1.0, 1, b, grid), DomainError);
        std::vector<double> bad(10, 1.0);
        CHECK_THROWS_AS(solve_modek(kBall, t, 1, bad, grid), DomainError);
    }
}

TEST_CASE("collocation agrees with the harmonic closed form when drift fades") {
    // at large t the drift is negligible; compare with the exact solution of
    // -a'' - 2a'/r + 2a/r^2 = b for a bump source, built from the r and r^-2
    // branches
    const double t = 1e8;
    auto bump = [](double r) {
        const double z = (r - 0.3) / 0.1;
        if (std::abs(z) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - z * z));
    };

    const RadialGrid grid = make_log_grid(1e-6, 1.0, 8193);
    std::vector<double> b(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) b[i] = bump(grid.r[i]);
    const std::vector<double> A = solve_modek(kBall, t, 1, b, grid);

    auto head = [&](double r) { // integral of b over [max(r,0.2), 0.4]
        const double lo = std::max(r, 0.2);
        if (lo >= 0.4) return 0.0;
        return integrate(bump, lo, 0.4, 1e-12, 1e-300).value;
    };
    auto tail = [&](double r) { // integral of rho^3 b over [0.2, min(r,0.4)]
        const double hi = std::min(r, 0.4);
        if (hi <= 0.2) return 0.0;
        return integrate([&](double x) { return x * x * x * bump(x); }, 0.2, hi,
                         1e-12, 1e-300)
            .value;
    };
    const double tail_full = tail(1.0);

    double sup_err = 0.0, sup_ref = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 64) {
        const double r = grid.r[i];
        const double ref =
            (r * head(r) + tail(r) / (r * r)) / 3.0 - r * tail_full / 3.0;
        sup_err = std::max(sup_err, std::abs(A[i] - ref));
        sup_ref = std::max(sup_ref, std::abs(ref));
    }
    CHECK(sup_ref > 0.0);
    CHECK(sup_err / sup_ref < 1e-3);

    // bump data is nonnegative, so the mode profile must be as well
    for (std::size_t i = 0; i < grid.size(); i += 16) CHECK(A[i] > -1e-12);
}

TEST_CASE("full linearized solve, mode by mode") {
    auto grid = std::make_shared<const RadialGrid>(make_log_grid(1e-6, 1.0, 4097));
    auto set = std::make_shared<const AngularSet>(make_angular_set(4));

    SUBCASE("band-limited data: residuals, ratio, and mode split") {
        // f = r^(-sigma-2) (1 + 0.3 x3/r): degrees 0 and 1 only
        ModeField f = decompose(grid, set, kBall, 2,
                                [&](double r, const std::array<double, 3>& dir) {
                                    return std::pow(r, -kBall.sigma - 2.0) *
                                           (1.0 + 0.3 * dir[2]);
                                });
        const LinearSolveReport rep = solve_Lt(kBall, 1e3, f);
        CHECK(rep.converged);
        CHECK(rep.residual < 1e-4);
        // the norm samples the angular nodes, none of which sits at the pole
        double top_z = 0.0;
        for (const AngularNode& node : set->nodes)
            top_z = std::max(top_z, std::abs(node.dir[2]));
        CHECK(rep.norm_Y == doctest::Approx(1.0 + 0.3 * top_z).epsilon(1e-6));
        CHECK(rep.mode_split == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rep.ratio > 0.0);
        CHECK(rep.ratio < 50.0);
        CHECK(rep.modes.size() == 9); // every slot through degree 2 is active
    }

    SUBCASE("mode-wise linearity") {
        auto small = std::make_shared<const RadialGrid>(make_log_grid(1e-6, 1.0, 1024));
        ModeField f1 = decompose(small, set, kBall, 2,
                                 [&](double r, const std::array<double, 3>& d) {
                                     return std::exp(-r) * (1.0 + d[0]);
                                 });
        ModeField f2 = decompose(small, set, kBall, 2,
                                 [&](double r, const std::array<double, 3>& d) {
                                     return r * (1.0 - 0.5 * d[2] * d[2]);
                                 });
        ModeField sum = decompose(small, set, kBall, 2,
                                  [&](double r, const std::array<double, 3>& d) {
                                      return std::exp(-r) * (1.0 + d[0]) +
                                             r * (1.0 - 0.5 * d[2] * d[2]);
                                  });
        ModeField combined = solve_Lt(kBall, 1e3, f1).phi;
        add_scaled(combined, solve_Lt(kBall, 1e3, f2).phi, 1.0);
        const ModeField direct = solve_Lt(kBall, 1e3, sum).phi;
        CHECK(diff_norm_X(combined, direct) < 1e-8);
    }

    SUBCASE("radial-only field passes through the quadrature path") {
        std::vector<double> vals(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i)
            vals[i] = std::pow(grid->r[i], -kBall.sigma - 2.0);
        const ModeField f = make_radial_field(grid, nullptr, kBall, vals);
        const LinearSolveReport rep = solve_Lt(kBall, 1e2, f);
        CHECK(rep.phi.radial_only());
        CHECK(rep.converged);
        CHECK(rep.mode_split == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("rejections") {
        std::vector<double> vals(grid->size(), 1.0);
        const ModeField f = make_radial_field(grid, nullptr, kBall, vals);
        CHECK_THROWS_AS(solve_Lt(kBall, 0.5, f), DomainError);
    }
}
