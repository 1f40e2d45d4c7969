// Independent high-precision references used by the tests. Everything here
// deliberately avoids the library's own special-function and kernel paths:
// gamma via a Spouge series in long double, convolution velocities via
// Gauss-Legendre x trapezoid quadrature of the exact (unregularized) kernel.
#ifndef MSQG_TESTS_ORACLES_HPP
#define MSQG_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <vector>

#include "msqg/vec2.hpp"

namespace oracles {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;

inline long double spouge_gamma(long double z) {
    const int a = 30;
    long double partial = std::sqrt(2.0L * kPiL);
    long double kfact = 1.0L;
    for (int k = 1; k < a; ++k) {
        if (k > 1) kfact *= static_cast<long double>(k - 1);
        long double ck = std::pow(static_cast<long double>(a - k), static_cast<long double>(k) - 0.5L) *
                         std::exp(static_cast<long double>(a - k)) / kfact;
        if ((k - 1) % 2 == 1) ck = -ck;
        partial += ck / (z + static_cast<long double>(k) - 1.0L);
    }
    return std::pow(z + static_cast<long double>(a) - 1.0L, z - 0.5L) *
           std::exp(-(z + static_cast<long double>(a) - 1.0L)) * partial;
}

/// phi(alpha) from the Spouge gamma: Gamma(a/2) / (pi 2^{2-a} Gamma((2-a)/2)).
inline double spouge_phi(double alpha) {
    const long double a = alpha;
    return static_cast<double>(spouge_gamma(a / 2.0L) /
                               (kPiL * std::pow(2.0L, 2.0L - a) * spouge_gamma((2.0L - a) / 2.0L)));
}

/// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = 0.5 * (1.0 + x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

/// Radial density profiles matching the library's blob profiles.
enum class Profile { uniform, radial_taper };

inline double profile_density(Profile profile, double intensity, double eps, double r) {
    if (profile == Profile::uniform) {
        return intensity / (M_PI * eps * eps);
    }
    const double u = 1.0 - (r / eps) * (r / eps);
    return 3.0 * intensity / (M_PI * eps * eps) * u * u;
}

/// u(x) = int K(x - y) theta(y) dy over a radial blob of radius eps centered
/// at c, with the exact kernel K(v) = coef * v_perp / |v|^{alpha+2}. The
/// evaluation point must be outside the support. Gauss-Legendre (radial) x
/// trapezoid (angular, spectrally accurate for the periodic integrand).
inline msqg::Vec2 quad_convolution_velocity(double alpha, msqg::Vec2 c, double eps,
                                            double intensity, Profile profile, msqg::Vec2 x,
                                            int nr = 96, int nphi = 1024) {
    const double coef = alpha > 0.0 ? alpha * spouge_phi(alpha) : 1.0 / (2.0 * M_PI);
    std::vector<double> rn, rw;
    gauss_legendre_01(nr, rn, rw);
    double ux = 0.0, uy = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = eps * rn[i];
        const double theta_r = profile_density(profile, intensity, eps, r);
        double sx = 0.0, sy = 0.0;
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * M_PI * j / nphi;
            const msqg::Vec2 y = c + msqg::Vec2{r * std::cos(phi), r * std::sin(phi)};
            const msqg::Vec2 d = x - y;
            const double q = d.norm_sq();
            const double p = std::pow(q, -(alpha + 2.0) / 2.0);
            sx += -d.y * p;
            sy += d.x * p;
        }
        const double ring = theta_r * r * (2.0 * M_PI / nphi) * rw[i] * eps;
        ux += ring * sx;
        uy += ring * sy;
    }
    return {coef * ux, coef * uy};
}

/// Triangle with the given side lengths: z1 = (0,0), z2 = (l12, 0), z3 above.
inline std::array<msqg::Vec2, 3> triangle_from_sides(double l12, double l13, double l23) {
    const double x3 = (l12 * l12 + l13 * l13 - l23 * l23) / (2.0 * l12);
    const double y3 = std::sqrt(l13 * l13 - x3 * x3);
    return {msqg::Vec2{0.0, 0.0}, msqg::Vec2{l12, 0.0}, msqg::Vec2{x3, y3}};
}

} // namespace oracles

#endif
