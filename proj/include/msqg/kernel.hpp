#ifndef MSQG_KERNEL_HPP
#define MSQG_KERNEL_HPP

#include <optional>
#include <span>
#include <vector>

#include "msqg/vec2.hpp"

namespace msqg {

/// Interpolation exponent of the active-scalar family: 0 is the 2-D Euler
/// vorticity equation, values approaching 1 the surface quasi-geostrophic
/// regime. Only [0, 1) is accepted.
class AlphaParam {
public:
    explicit AlphaParam(double alpha);
    double value() const { return alpha_; }

private:
    double alpha_;
};

/// Coefficients of the Green function G(r) = phi * r^{-alpha} of the
/// fractional Laplacian (-Delta)^{1 - alpha/2} on the plane.
///
/// phi diverges as alpha -> 0 while every velocity formula uses only the
/// product alpha*phi(alpha), which extends continuously to 1/(2 pi) at
/// alpha = 0 (the Euler Biot-Savart constant). The product is therefore
/// stored as the primitive constant; phi itself is absent at alpha = 0,
/// where the Green function is logarithmic.
struct KernelCoefficients {
    std::optional<double> phi;
    double alpha_phi;
};

/// Raw coefficient phi(a) = Gamma(a/2) / (pi 2^{2-a} Gamma((2-a)/2)), 0 < a < 2.
double phi_formula(double alpha);

/// Kernel coefficients for a validated alpha. At alpha = 0, phi is absent
/// and alpha_phi equals exactly 1/(2 pi).
KernelCoefficients phi_alpha(AlphaParam alpha);

/// Green function value at separation r > 0:
///   alpha in (0,1):  phi(alpha) r^{-alpha}
///   alpha = 0:       -log(r) / (2 pi)
double green(AlphaParam alpha, double r);

/// Velocity kernel K = grad_perp G with grad_perp = (d_2, -d_1).
///
/// With G(x) = phi |x|^{-alpha}: d_j |x|^{-alpha} = -alpha |x|^{-alpha-2} x_j, so
///   grad_perp G = -alpha phi |x|^{-alpha-2} (x_2, -x_1)
///               =  alpha phi (-x_2, x_1) / |x|^{alpha+2}.
/// At alpha = 0 with G = -log|x|/(2 pi) the same steps give x_perp/(2 pi |x|^2),
/// consistent with alpha*phi(alpha) -> 1/(2 pi). Throws SingularityError at x = 0.
Vec2 kernel_velocity(AlphaParam alpha, Vec2 x);

/// Mollified kernel, grad_perp of the smoothed Green function
/// phi (|x|^2 + s^2)^{-alpha/2}:
///   K_s(x) = alpha phi x_perp (|x|^2 + s^2)^{-(alpha+2)/2}.
/// Divergence-free (perpendicular gradient of a radial function), globally
/// smooth for s > 0, equal to kernel_velocity at s = 0, and zero at x = 0.
Vec2 kernel_regularized(AlphaParam alpha, double smoothing, Vec2 x);

/// Pairwise velocity summation with the mollified kernel. Construction
/// fixes alpha and the smoothing length and selects the power
/// evaluation path once, so the per-pair cost stays small.
///
/// Pure value semantics: safe to call concurrently. Per-target source
/// sums always run in index order, so results do not depend on thread
/// count.
class KernelSum {
public:
    KernelSum(AlphaParam alpha, double smoothing);

    /// Velocity at one point induced by weighted point sources.
    Vec2 at(Vec2 point, std::span<const Vec2> sources, std::span<const double> weights) const;

    /// Velocity at every target; parallel over targets.
    void at_many(std::span<const Vec2> targets, std::span<const Vec2> sources,
                 std::span<const double> weights, std::span<Vec2> out) const;

    /// One kernel evaluation through the same power path as the sums.
    Vec2 single(Vec2 x) const;

    double smoothing() const { return smoothing_; }
    double alpha() const { return alpha_; }

private:
    enum class PowPath { euler, quarter, half, three_quarter, generic };

    double alpha_;
    double smoothing_;
    double coef_;      // alpha*phi(alpha)
    double exponent_;  // -(alpha+2)/2, generic path only
    PowPath path_;
};

} // namespace msqg

#endif
