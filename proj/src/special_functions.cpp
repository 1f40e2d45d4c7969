#include "msqg/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msqg {

namespace {

// Lanczos coefficients for g = 7, n = 9 (Godfrey's set).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double lanczos_gamma(double z) {
    // valid for z >= 0.5
    const double pi = 3.14159265358979323846;
    z -= 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) {
        acc += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

} // namespace

double gamma_function(double z) {
    if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
    if (z <= 0.0 && z == std::floor(z)) {
        throw std::domain_error("gamma_function: pole at non-positive integer");
    }
    const double pi = 3.14159265358979323846;
    if (z < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return pi / (std::sin(pi * z) * lanczos_gamma(1.0 - z));
    }
    return lanczos_gamma(z);
}

} // namespace msqg
