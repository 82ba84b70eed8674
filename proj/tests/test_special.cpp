#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "relaydp/special.hpp"

using relaydp::exp_integral_e1;

TEST_CASE("exp_integral_e1 rejects the nonpositive domain") {
    CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("exp_integral_e1 matches the quadrature oracle at spot values") {
    // Frozen from the adaptive-quadrature oracle (and cross-checked
    // against the defining series below x = 1).
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.21938393439552026).epsilon(1e-12));
    CHECK(exp_integral_e1(1.0) == doctest::Approx(oracle::quad_e1(1.0)).epsilon(1e-12));
    CHECK(exp_integral_e1(1e-3) == doctest::Approx(6.3315393641361500).epsilon(1e-12));
    CHECK(exp_integral_e1(1e-3) == doctest::Approx(oracle::quad_e1(1e-3)).epsilon(1e-11));
}

TEST_CASE("exp_integral_e1 leading asymptotic term") {
    // E1(x) * x * e^x -> 1.
    const double x = 50.0;
    CHECK(exp_integral_e1(x) * x * std::exp(x) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exp_integral_e1 relative error across twelve decades") {
    // The full thousand-point version runs in the acceptance suite;
    // this covers the same span more coarsely.
    const int n = 121;
    for (int i = 0; i < n; ++i) {
        const double lx = -12.0 + (std::log10(700.0) + 12.0) * i / (n - 1);
        const double x = std::pow(10.0, lx);
        const double ref = oracle::quad_e1(x);
        CHECK(std::fabs(exp_integral_e1(x) - ref) <= 1e-10 * std::fabs(ref));
    }
}
