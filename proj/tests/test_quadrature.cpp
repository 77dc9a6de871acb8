#include <doctest.h>

#include <cmath>

#include "singrad/quadrature.hpp"

using namespace singrad;

TEST_CASE("polynomials and smooth integrands to tight relative error") {
    auto sq = [](double x) { return x * x; };
    CHECK(integrate(sq, 0.0, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    auto expf = [](double x) { return std::exp(x); };
    CHECK(integrate(expf, 0.0, 1.0).value ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

    auto sinf = [](double x) { return std::sin(x); };
    CHECK(integrate(sinf, 0.0, M_PI).value == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("orientation and degenerate interval") {
    auto f = [](double x) { return std::cos(x); };
    const double fwd = integrate(f, 0.0, 1.0).value;
    const double bwd = integrate(f, 1.0, 0.0).value;
    CHECK(fwd == doctest::Approx(-bwd).epsilon(1e-14));
    CHECK(integrate(f, 0.5, 0.5).value == 0.0);
}

TEST_CASE("log substitution tames an integrable power singularity") {
    // integral of y^(-1/2) over [1e-12, 1] = 2(1 - 1e-6)
    auto f = [](double y) { return 1.0 / std::sqrt(y); };
    const double exact = 2.0 * (1.0 - 1e-6);
    CHECK(integrate_log(f, 1e-12, 1.0).value == doctest::Approx(exact).epsilon(1e-12));

    // steep but smooth in log coordinates: y^(-4/3) over [1e-9, 1]
    auto g = [](double y) { return std::pow(y, -4.0 / 3.0); };
    const double exact_g = 3.0 * (std::pow(1e-9, -1.0 / 3.0) - 1.0);
    CHECK(integrate_log(g, 1e-9, 1.0).value == doctest::Approx(exact_g).epsilon(1e-12));
}

TEST_CASE("panel budget exhaustion raises QuadratureError") {
    auto wild = [](double x) { return std::sin(1000.0 * x); };
    CHECK_THROWS_AS(integrate(wild, 0.0, 10.0, 1e-14, 0.0, 3), QuadratureError);
}

TEST_CASE("log substitution rejects nonpositive bounds") {
    auto f = [](double y) { return y; };
    CHECK_THROWS_AS(integrate_log(f, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(integrate_log(f, 0.0, 1.0), DomainError);
}
