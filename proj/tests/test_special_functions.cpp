#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "msqg/special_functions.hpp"
#include "oracles.hpp"

using msqg::gamma_function;

TEST_CASE("gamma matches exact values") {
    const double sqrt_pi = std::sqrt(M_PI);
    CHECK(gamma_function(0.5) == doctest::Approx(sqrt_pi).epsilon(1e-13));
    CHECK(gamma_function(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_function(1.5) == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-13));
    CHECK(gamma_function(2.0) == doctest::Approx(1.0).epsilon(1e-13));
    // frozen reference values (Spouge series, long double)
    CHECK(gamma_function(0.25) == doctest::Approx(3.6256099082219083).epsilon(1e-13));
    CHECK(gamma_function(0.75) == doctest::Approx(1.2254167024651776).epsilon(1e-13));
}

TEST_CASE("gamma reflection identity") {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    for (double z : {0.1, 0.25, 0.4, 0.45}) {
        const double product = gamma_function(z) * gamma_function(1.0 - z);
        CHECK(product == doctest::Approx(M_PI / std::sin(M_PI * z)).epsilon(1e-12));
    }
}

TEST_CASE("gamma tracks the independent Spouge oracle on (0, 2)") {
    for (int i = 1; i <= 39; ++i) {
        const double z = 0.05 * i;
        const double reference = static_cast<double>(oracles::spouge_gamma(z));
        CHECK(gamma_function(z) == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("gamma rejects poles") {
    CHECK_THROWS_AS(gamma_function(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_function(-1.0), std::domain_error);
}
