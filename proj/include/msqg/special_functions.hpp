#ifndef MSQG_SPECIAL_FUNCTIONS_HPP
#define MSQG_SPECIAL_FUNCTIONS_HPP

namespace msqg {

/// Euler Gamma function, Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula for z < 1/2. Relative accuracy is better than 1e-13
/// on (0, 2), the range the velocity-kernel coefficients draw from.
double gamma_function(double z);

} // namespace msqg

#endif
