#ifndef MSQG_EXTERNAL_FIELD_HPP
#define MSQG_EXTERNAL_FIELD_HPP

#include <cstdint>
#include <memory>
#include <variant>

#include "msqg/kernel.hpp"
#include "msqg/pseudo_vortex.hpp"
#include "msqg/vec2.hpp"

namespace msqg {

/// Divergence-free external drivers with exactly known Lipschitz constants.

struct ZeroField {};

struct UniformTranslation {
    Vec2 velocity;
};

struct RigidRotation {
    double omega = 0.0;
    Vec2 center{0.0, 0.0};  // F(x) = omega * (x - center)_perp
};

struct LinearStrain {
    double rate = 0.0;  // F(x) = rate * (x_1, -x_2)
};

/// Velocity generated by the other members of a point-vortex trajectory,
/// excluding one index (the vortex whose neighborhood the field drives).
/// protect_radius is the radius of the disk around the excluded vortex on
/// which the Lipschitz bound is quoted.
struct OtherVortices {
    std::shared_ptr<const PvTrajectory> trajectory;
    double alpha = 0.5;
    std::size_t excluded = 0;
    double protect_radius = 0.0;
};

using ExternalField = std::variant<ZeroField, UniformTranslation, RigidRotation, LinearStrain,
                                   OtherVortices>;

/// F(x, t). For OtherVortices the sources are linearly interpolated between
/// trajectory samples; evaluation outside the stored span throws
/// ExtrapolationError.
Vec2 eval_field(const ExternalField& field, Vec2 x, double t);

/// A valid spatial Lipschitz constant D_t of the field at time t. For
/// OtherVortices the bound holds on the protected disk around the excluded
/// vortex: each source at standoff rho contributes
/// |a| alpha phi(alpha) (alpha+1) / rho^{alpha+2}, the exact operator norm of
/// the kernel Jacobian at distance rho. Throws std::domain_error when a
/// source reaches the protected disk (standoff <= 0).
double lipschitz_bound(const ExternalField& field, double t);

/// Empirical sanity probe of a field on a disk: random point pairs against
/// the quoted Lipschitz constant, and central-difference divergence.
struct FieldSpotCheck {
    double worst_lipschitz_ratio = 0.0;  // max |F(x)-F(y)| / (D |x-y|)
    double worst_divergence = 0.0;       // max |central-difference divergence|
    double field_scale = 0.0;            // max |F| over the sampled points
};

FieldSpotCheck field_spot_check(const ExternalField& field, double t, Vec2 center, double radius,
                                std::uint64_t seed, int pairs = 10000, double fd_step = 1e-4);

} // namespace msqg

#endif
