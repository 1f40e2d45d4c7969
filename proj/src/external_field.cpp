#include "msqg/external_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "msqg/errors.hpp"

namespace msqg {

namespace {

Vec2 other_vortices_velocity(const OtherVortices& ov, Vec2 x, double t) {
    if (!ov.trajectory) {
        throw std::invalid_argument("OtherVortices: missing trajectory");
    }
    const AlphaParam alpha(ov.alpha);
    const std::vector<Vec2> z = ov.trajectory->positions_at(t);
    Vec2 acc{0.0, 0.0};
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (j == ov.excluded) continue;
        acc += ov.trajectory->intensities[j] * kernel_velocity(alpha, x - z[j]);
    }
    return acc;
}

double other_vortices_lipschitz(const OtherVortices& ov, double t) {
    if (!ov.trajectory) {
        throw std::invalid_argument("OtherVortices: missing trajectory");
    }
    const AlphaParam alpha(ov.alpha);
    const double coef = phi_alpha(alpha).alpha_phi;
    const double a = ov.alpha;
    const std::vector<Vec2> z = ov.trajectory->positions_at(t);
    if (ov.excluded >= z.size()) {
        throw std::invalid_argument("OtherVortices: excluded index out of range");
    }
    double bound = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (j == ov.excluded) continue;
        const double standoff = distance(z[j], z[ov.excluded]) - ov.protect_radius;
        if (standoff <= 0.0) {
            throw std::domain_error("lipschitz_bound: source inside the protected disk");
        }
        bound += std::abs(ov.trajectory->intensities[j]) * coef * (a + 1.0) /
                 std::pow(standoff, a + 2.0);
    }
    return bound;
}

} // namespace

Vec2 eval_field(const ExternalField& field, Vec2 x, double t) {
    return std::visit(
        [&](const auto& f) -> Vec2 {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroField>) {
                return {0.0, 0.0};
            } else if constexpr (std::is_same_v<T, UniformTranslation>) {
                return f.velocity;
            } else if constexpr (std::is_same_v<T, RigidRotation>) {
                return f.omega * (x - f.center).perp();
            } else if constexpr (std::is_same_v<T, LinearStrain>) {
                return {f.rate * x.x, -f.rate * x.y};
            } else {
                return other_vortices_velocity(f, x, t);
            }
        },
        field);
}

double lipschitz_bound(const ExternalField& field, double t) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ZeroField>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, UniformTranslation>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, RigidRotation>) {
                return std::abs(f.omega);
            } else if constexpr (std::is_same_v<T, LinearStrain>) {
                return std::abs(f.rate);
            } else {
                return other_vortices_lipschitz(f, t);
            }
        },
        field);
}

FieldSpotCheck field_spot_check(const ExternalField& field, double t, Vec2 center, double radius,
                                std::uint64_t seed, int pairs, double fd_step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto sample_disk = [&]() {
        const double r = radius * std::sqrt(unit(rng));
        const double phi = 2.0 * 3.14159265358979323846 * unit(rng);
        return center + Vec2{r * std::cos(phi), r * std::sin(phi)};
    };

    FieldSpotCheck check;
    const double bound = lipschitz_bound(field, t);
    for (int k = 0; k < pairs; ++k) {
        const Vec2 x = sample_disk();
        const Vec2 y = sample_disk();
        const Vec2 fx = eval_field(field, x, t);
        const Vec2 fy = eval_field(field, y, t);
        check.field_scale = std::max({check.field_scale, fx.norm(), fy.norm()});
        const double sep = (x - y).norm();
        if (sep > 0.0) {
            const double diff = (fx - fy).norm();
            const double ratio = bound > 0.0
                                     ? diff / (bound * sep)
                                     : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            check.worst_lipschitz_ratio = std::max(check.worst_lipschitz_ratio, ratio);
        }
        if (k % 100 == 0) {
            const double h = fd_step;
            const double div = (eval_field(field, x + Vec2{h, 0.0}, t).x -
                                eval_field(field, x - Vec2{h, 0.0}, t).x +
                                eval_field(field, x + Vec2{0.0, h}, t).y -
                                eval_field(field, x - Vec2{0.0, h}, t).y) /
                               (2.0 * h);
            check.worst_divergence = std::max(check.worst_divergence, std::abs(div));
        }
    }
    return check;
}

} // namespace msqg
