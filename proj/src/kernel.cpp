#include "msqg/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "msqg/errors.hpp"
#include "msqg/special_functions.hpp"

namespace msqg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvTwoPi = 1.0 / (2.0 * kPi);

// q^{-(alpha+2)/2} = 1 / (q * q^{alpha/2}) for the alphas the runs use.
// sqrt chains beat pow by ~3x in the pairwise loop and vectorize.
struct PowEuler {        // alpha = 0
    static double inv_pow(double q, double) { return 1.0 / q; }
};
struct PowQuarter {      // alpha = 1/4, q^{alpha/2} = q^{1/8}
    static double inv_pow(double q, double) {
        return 1.0 / (q * std::sqrt(std::sqrt(std::sqrt(q))));
    }
};
struct PowHalf {         // alpha = 1/2, q^{alpha/2} = q^{1/4}
    static double inv_pow(double q, double) {
        return 1.0 / (q * std::sqrt(std::sqrt(q)));
    }
};
struct PowThreeQuarter { // alpha = 3/4, q^{alpha/2} = q^{1/4} q^{1/8}
    static double inv_pow(double q, double) {
        const double r4 = std::sqrt(std::sqrt(q));
        return 1.0 / (q * r4 * std::sqrt(r4));
    }
};
struct PowGeneric {
    static double inv_pow(double q, double expo) { return std::pow(q, expo); }
};

template <class Op>
Vec2 accumulate(Vec2 target, const double* sx, const double* sy, const double* w,
                std::size_t n, double s2, double coef, double expo) {
    double ax = 0.0;
    double ay = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = target.x - sx[k];
        const double dy = target.y - sy[k];
        const double q = dx * dx + dy * dy + s2;
        const double ww = w[k] * Op::inv_pow(q, expo);
        ax -= ww * dy;
        ay += ww * dx;
    }
    return {coef * ax, coef * ay};
}

using AccumFn = Vec2 (*)(Vec2, const double*, const double*, const double*, std::size_t,
                         double, double, double);

template <class Op>
Vec2 single_eval(Vec2 x, double s2, double coef, double expo) {
    const double q = x.norm_sq() + s2;
    return coef * Op::inv_pow(q, expo) * x.perp();
}

} // namespace

AlphaParam::AlphaParam(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::domain_error("AlphaParam: alpha must lie in [0, 1), got " + std::to_string(alpha));
    }
}

double phi_formula(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::domain_error("phi_formula: alpha must lie in (0, 2)");
    }
    return gamma_function(alpha / 2.0) /
           (kPi * std::pow(2.0, 2.0 - alpha) * gamma_function((2.0 - alpha) / 2.0));
}

KernelCoefficients phi_alpha(AlphaParam alpha) {
    const double a = alpha.value();
    if (a == 0.0) {
        return {std::nullopt, kInvTwoPi};
    }
    const double phi = phi_formula(a);
    return {phi, a * phi};
}

double green(AlphaParam alpha, double r) {
    if (!(r > 0.0)) {
        throw std::domain_error("green: separation must be positive");
    }
    const double a = alpha.value();
    if (a == 0.0) {
        return -std::log(r) * kInvTwoPi;
    }
    return phi_formula(a) * std::pow(r, -a);
}

Vec2 kernel_velocity(AlphaParam alpha, Vec2 x) {
    if (x.x == 0.0 && x.y == 0.0) {
        throw SingularityError("kernel_velocity: evaluation at the singular point x = 0", 0, 0);
    }
    return KernelSum(alpha, 0.0).single(x);
}

Vec2 kernel_regularized(AlphaParam alpha, double smoothing, Vec2 x) {
    if (!(smoothing >= 0.0)) {
        throw std::domain_error("kernel_regularized: smoothing must be nonnegative");
    }
    if (x.x == 0.0 && x.y == 0.0) {
        return {0.0, 0.0};
    }
    return KernelSum(alpha, smoothing).single(x);
}

KernelSum::KernelSum(AlphaParam alpha, double smoothing)
    : alpha_(alpha.value()), smoothing_(smoothing) {
    if (!(smoothing >= 0.0)) {
        throw std::domain_error("KernelSum: smoothing must be nonnegative");
    }
    coef_ = phi_alpha(alpha).alpha_phi;
    exponent_ = -(alpha_ + 2.0) / 2.0;
    if (alpha_ == 0.0) path_ = PowPath::euler;
    else if (alpha_ == 0.25) path_ = PowPath::quarter;
    else if (alpha_ == 0.5) path_ = PowPath::half;
    else if (alpha_ == 0.75) path_ = PowPath::three_quarter;
    else path_ = PowPath::generic;
}

namespace {

AccumFn select_accum(int path) {
    switch (path) {
        case 0: return &accumulate<PowEuler>;
        case 1: return &accumulate<PowQuarter>;
        case 2: return &accumulate<PowHalf>;
        case 3: return &accumulate<PowThreeQuarter>;
        default: return &accumulate<PowGeneric>;
    }
}

} // namespace

Vec2 KernelSum::single(Vec2 x) const {
    const double s2 = smoothing_ * smoothing_;
    switch (path_) {
        case PowPath::euler: return single_eval<PowEuler>(x, s2, coef_, exponent_);
        case PowPath::quarter: return single_eval<PowQuarter>(x, s2, coef_, exponent_);
        case PowPath::half: return single_eval<PowHalf>(x, s2, coef_, exponent_);
        case PowPath::three_quarter: return single_eval<PowThreeQuarter>(x, s2, coef_, exponent_);
        default: return single_eval<PowGeneric>(x, s2, coef_, exponent_);
    }
}

Vec2 KernelSum::at(Vec2 point, std::span<const Vec2> sources, std::span<const double> weights) const {
    const std::size_t n = sources.size();
    std::vector<double> sx(n), sy(n);
    for (std::size_t k = 0; k < n; ++k) {
        sx[k] = sources[k].x;
        sy[k] = sources[k].y;
    }
    const AccumFn fn = select_accum(static_cast<int>(path_));
    return fn(point, sx.data(), sy.data(), weights.data(), n, smoothing_ * smoothing_, coef_, exponent_);
}

void KernelSum::at_many(std::span<const Vec2> targets, std::span<const Vec2> sources,
                        std::span<const double> weights, std::span<Vec2> out) const {
    const std::size_t n = sources.size();
    std::vector<double> sx(n), sy(n);
    for (std::size_t k = 0; k < n; ++k) {
        sx[k] = sources[k].x;
        sy[k] = sources[k].y;
    }
    const AccumFn fn = select_accum(static_cast<int>(path_));
    const double s2 = smoothing_ * smoothing_;
    const auto m = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < m; ++t) {
        out[static_cast<std::size_t>(t)] =
            fn(targets[static_cast<std::size_t>(t)], sx.data(), sy.data(), weights.data(), n, s2,
               coef_, exponent_);
    }
}

} // namespace msqg
