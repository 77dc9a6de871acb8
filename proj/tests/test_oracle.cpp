#include <doctest.h>

#include "singrad/errors.hpp"
#include "singrad/oracle.hpp"
#include "singrad/params.hpp"

#include <cmath>
#include <vector>

using namespace singrad;

namespace {

// Midpoint rule for the integral form of the first-order Taylor remainder,
//   remainder/|y|^p = p * int_0^1 (1-s) R^{(p-4)/2} [R + (p-2)(rho c + s)^2] ds,
// R(s) = rho^2 + 2 s rho c + s^2. Independent of the two-branch evaluator.
double remainder_by_quadrature(double p, double rho, double c, int K) {
    const double h = 1.0 / K;
    double sum = 0.0;
    for (int i = 0; i < K; ++i) {
        const double s = (i + 0.5) * h;
        const double R = rho * rho + 2.0 * s * rho * c + s * s;
        const double a = rho * c + s;
        sum += p * (1.0 - s) * std::pow(R, 0.5 * p - 2.0) * (R + (p - 2.0) * a * a);
    }
    return sum * h;
}

} // namespace

TEST_CASE("remainder core is exactly one at the quadratic exponent") {
    // |x+y|^2 - |x|^2 - 2 x.y = |y|^2, so the scaled remainder is 1 for
    // every rho and c, on both evaluation branches.
    for (double rho : {0.0, 0.3, 1.0, 7.9, 8.0, 8.1, 50.0, 1e4}) {
        for (double c : {-1.0, -0.5, 0.0, 0.7, 1.0}) {
            CHECK(std::abs(ineq1_remainder_rel(2.0, rho, c) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("remainder core at the origin equals one for every exponent") {
    for (double p : {1.1, 1.5, 1.75, 2.0, 2.5, 3.0}) {
        for (double c : {-1.0, 0.0, 1.0}) {
            CHECK(ineq1_remainder_rel(p, 0.0, c) == 1.0);
        }
    }
}

TEST_CASE("remainder core is nonnegative across both branches") {
    const std::vector<double> rhos = {0.0,  1e-4, 0.01, 0.1, 0.5, 0.9, 0.99, 1.0,
                                      1.01, 2.0,  5.0,  7.99, 8.0, 8.01, 20.0, 1e2,
                                      1e3,  1e4};
    const std::vector<double> cs = {-1.0, -0.99, -0.7, -0.3, 0.0, 0.4, 0.9, 1.0};
    for (double p : {1.05, 1.3, 1.5, 1.75, 1.95, 2.0, 2.5, 3.0}) {
        for (double rho : rhos) {
            for (double c : cs) {
                CHECK(ineq1_remainder_rel(p, rho, c) >= 0.0);
            }
        }
    }
}

TEST_CASE("remainder core is continuous across the branch seam") {
    for (double p : {1.1, 1.75, 2.5}) {
        for (double c : {-0.9, -0.3, 0.2, 0.8}) {
            const double lo = ineq1_remainder_rel(p, 8.0 * (1.0 - 5e-10), c);
            const double hi = ineq1_remainder_rel(p, 8.0 * (1.0 + 5e-10), c);
            CHECK(std::abs(hi - lo) <= 1e-8 * std::abs(lo));
        }
    }
}

TEST_CASE("remainder core agrees with its integral representation") {
    struct Point {
        double p, rho, c;
    };
    // All points keep |x + s y| bounded away from zero, where the midpoint
    // rule converges at its nominal rate.
    const std::vector<Point> pts = {{1.3, 4.0, 0.5},   {1.3, 0.25, -0.4}, {1.3, 64.0, -0.5},
                                    {1.75, 1e3, 0.8},  {1.75, 0.2, 0.9},  {2.5, 30.0, -0.7}};
    for (const Point& q : pts) {
        const double core = ineq1_remainder_rel(q.p, q.rho, q.c);
        const double ref = remainder_by_quadrature(q.p, q.rho, q.c, 40000);
        CHECK(core == doctest::Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("inequality names round-trip") {
    CHECK(to_string(Ineq::I1) == "I1");
    CHECK(to_string(Ineq::I2) == "I2");
    CHECK(to_string(Ineq::I3) == "I3");
    CHECK(to_string(Ineq::I3_pgt2) == "I3_pgt2");
}

TEST_CASE("sampled inequality checks find no violations") {
    const long long n = 100000;
    struct Expect {
        Ineq id;
        double p;
        double C;
    };
    // Frozen constants for n = 1e5, dim = 8, seed = 42. The draws use only
    // the standard-specified engine, so these reproduce across platforms.
    const std::vector<Expect> table = {
        {Ineq::I1, 1.10, 1.662052620307}, {Ineq::I2, 1.10, 1.477346385684},
        {Ineq::I3, 1.10, 0.883466001357}, {Ineq::I1, 1.50, 1.269628087074},
        {Ineq::I2, 1.50, 1.281312239190}, {Ineq::I3, 1.50, 1.392546027024},
        {Ineq::I1, 1.75, 1.125505784319}, {Ineq::I2, 1.75, 1.128456997998},
        {Ineq::I3, 1.75, 1.645760108432}, {Ineq::I3, 2.00, 1.893649668036},
        {Ineq::I3_pgt2, 2.50, 1.839979618017}, {Ineq::I3_pgt2, 3.00, 2.922720185415},
    };
    for (const Expect& e : table) {
        const OracleReport rep = check_ineq(e.id, e.p, 8, n, 42);
        CHECK(rep.violations == 0);
        CHECK(rep.C_estimate == doctest::Approx(e.C).epsilon(1e-9));
        CHECK(rep.id == e.id);
        CHECK(rep.p == e.p);
        CHECK(rep.dim == 8);
        CHECK(rep.n_samples == n);
        CHECK(rep.seed == 42);
    }
}

TEST_CASE("quadratic exponent estimates land on the sharp constant") {
    // At p = 2 the first inequality is an identity, so the estimated
    // constant must be 1 to near machine precision.
    const OracleReport r1 = check_ineq(Ineq::I1, 2.0, 8, 100000, 42);
    CHECK(r1.violations == 0);
    CHECK(std::abs(r1.C_estimate - 1.0) <= 1e-12);
    const OracleReport r2 = check_ineq(Ineq::I2, 2.0, 8, 100000, 42);
    CHECK(r2.violations == 0);
    CHECK(std::abs(r2.C_estimate - 1.0) <= 1e-12);
}

TEST_CASE("sampled checks cover edge shapes") {
    const OracleReport one_dim = check_ineq(Ineq::I1, 1.75, 1, 100000, 42);
    CHECK(one_dim.violations == 0);
    CHECK(one_dim.C_estimate == doctest::Approx(1.140546543870).epsilon(1e-9));

    // Sample count not divisible by the shard count exercises the remainder
    // distribution across shards.
    const OracleReport odd = check_ineq(Ineq::I2, 1.5, 3, 100003, 11);
    CHECK(odd.violations == 0);
    CHECK(odd.C_estimate == doctest::Approx(1.302873251271).epsilon(1e-9));

    const OracleReport tiny = check_ineq(Ineq::I1, 1.75, 3, 1, 5);
    CHECK(tiny.violations == 0);
    CHECK(tiny.C_estimate > 0.0);
    CHECK(std::isfinite(tiny.C_estimate));
}

TEST_CASE("sampled checks reproduce bit for bit") {
    const OracleReport a = check_ineq(Ineq::I1, 1.75, 3, 200000, 7);
    const OracleReport b = check_ineq(Ineq::I1, 1.75, 3, 200000, 7);
    CHECK(a.C_estimate == b.C_estimate);
    CHECK(a.violations == b.violations);
    CHECK(a.C_estimate == doctest::Approx(1.1404107003581911).epsilon(1e-12));
}

TEST_CASE("sampled checks reject bad hypotheses and shapes") {
    CHECK_THROWS_AS(check_ineq(Ineq::I1, 2.5, 3, 10, 1), HypothesisError);
    CHECK_THROWS_AS(check_ineq(Ineq::I1, 1.0, 3, 10, 1), HypothesisError);
    CHECK_THROWS_AS(check_ineq(Ineq::I2, 0.5, 3, 10, 1), HypothesisError);
    CHECK_THROWS_AS(check_ineq(Ineq::I3_pgt2, 2.0, 3, 10, 1), HypothesisError);
    CHECK_THROWS_AS(check_ineq(Ineq::I1, 1.75, 0, 10, 1), ConfigError);
    CHECK_THROWS_AS(check_ineq(Ineq::I1, 1.75, 9, 10, 1), ConfigError);
    CHECK_THROWS_AS(check_ineq(Ineq::I1, 1.75, 3, 0, 1), ConfigError);
}

TEST_CASE("lemma constant estimates are finite and frozen") {
    const Params P = new_ball_params(3, 1.75);
    const LemmaConstantReport rep = estimate_lemma_constants(P, 1e3, 0.1, 0.25, 16);
    CHECK(rep.t == 1e3);
    CHECK(rep.delta == 0.1);
    CHECK(rep.R == 0.25);
    CHECK(rep.n_fields == 16);

    // Closed-form summands.
    CHECK(rep.summand_Rp == doctest::Approx(std::pow(0.25, 1.75)).epsilon(1e-15));
    CHECK(rep.summand_g_sup == 0.05);
    const double q = (P.N - 1) * P.p - P.sigma - 2.0;
    CHECK(rep.summand_tail ==
          doctest::Approx(std::pow(1e3, -P.p / (P.p - 1.0)) * std::pow(0.1, -q)).epsilon(1e-14));
    CHECK(rep.contraction_Rp1 == doctest::Approx(std::pow(0.25, 0.75)).epsilon(1e-15));
    CHECK(rep.contraction_tail ==
          doctest::Approx(1.0 / (1e3 * std::pow(0.1, P.alpha - 1.0))).epsilon(1e-14));

    // Measured constants for the default seed, frozen.
    CHECK(rep.into_full_C == doctest::Approx(8.121234509830e-02).epsilon(1e-9));
    CHECK(rep.into_remainder_C == doctest::Approx(3.179833827507e-01).epsilon(1e-9));
    CHECK(rep.contraction_I_C == doctest::Approx(3.371169050382e-01).epsilon(1e-9));
    CHECK(rep.contraction_J_C == doctest::Approx(1.455692366157e-01).epsilon(1e-9));
}

TEST_CASE("lemma tail summand scales at the predicted delta rate") {
    const Params P = new_ball_params(3, 1.75);
    const LemmaConstantReport a = estimate_lemma_constants(P, 1e3, 0.1, 0.25, 2);
    const LemmaConstantReport b = estimate_lemma_constants(P, 1e3, 0.2, 0.25, 2);
    const double q = (P.N - 1) * P.p - P.sigma - 2.0;
    CHECK(b.summand_tail / a.summand_tail ==
          doctest::Approx(std::pow(2.0, -q)).epsilon(1e-13));
}

TEST_CASE("zero perturbation radius zeroes the field-driven constants") {
    const Params P = new_ball_params(3, 1.75);
    const LemmaConstantReport rep = estimate_lemma_constants(P, 1e3, 0.1, 0.0, 16);
    CHECK(rep.summand_Rp == 0.0);
    CHECK(rep.into_remainder_C == 0.0);
    CHECK(rep.contraction_I_C == 0.0);
    CHECK(rep.contraction_J_C == 0.0);
    // The source term itself does not vanish: the profile gradient alone
    // still contributes, just at a tiny level for large t.
    CHECK(rep.into_full_C > 0.0);
    CHECK(rep.into_full_C < 1e-4);
}

TEST_CASE("lemma constant estimates reproduce and respond to the seed") {
    const Params P = new_ball_params(3, 1.75);
    const LemmaConstantReport a = estimate_lemma_constants(P, 1e3, 0.1, 0.25, 8, 99);
    const LemmaConstantReport b = estimate_lemma_constants(P, 1e3, 0.1, 0.25, 8, 99);
    CHECK(a.into_full_C == b.into_full_C);
    CHECK(a.into_remainder_C == b.into_remainder_C);
    CHECK(a.contraction_I_C == b.contraction_I_C);
    CHECK(a.contraction_J_C == b.contraction_J_C);

    const LemmaConstantReport c = estimate_lemma_constants(P, 1e3, 0.1, 0.25, 8, 100);
    CHECK(c.into_remainder_C != a.into_remainder_C);
    CHECK(c.into_remainder_C > 0.0);
    CHECK(std::isfinite(c.into_remainder_C));
}

TEST_CASE("lemma constant estimator rejects malformed requests") {
    const Params P = new_ball_params(3, 1.75);
    CHECK_THROWS_AS(estimate_lemma_constants(new_exterior_params(3, 1.75, 0.1), 1e3, 0.1, 0.25, 4),
                    RegimeError);
    CHECK_THROWS_AS(estimate_lemma_constants(P, 1.0, 0.1, 0.25, 4), DomainError);
    CHECK_THROWS_AS(estimate_lemma_constants(P, 1e3, 0.0, 0.25, 4), DomainError);
    CHECK_THROWS_AS(estimate_lemma_constants(P, 1e3, 1.0, 0.25, 4), DomainError);
    CHECK_THROWS_AS(estimate_lemma_constants(P, 1e3, 0.1, -0.1, 4), DomainError);
    CHECK_THROWS_AS(estimate_lemma_constants(P, 1e3, 0.1, 0.25, 0), ConfigError);
}
