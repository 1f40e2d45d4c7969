#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "msqg/errors.hpp"
#include "msqg/kernel.hpp"
#include "oracles.hpp"

using msqg::AlphaParam;
using msqg::KernelSum;
using msqg::Vec2;

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// frozen via the Spouge oracle (tests/oracles.hpp)
constexpr double kPhiQuarter = 0.6543075347041283;
constexpr double kPhiHalf = 0.3329679355017002;
constexpr double kPhiThreeQuarter = 0.2211488278860302;

} // namespace

TEST_CASE("AlphaParam accepts [0,1) only") {
    CHECK_NOTHROW(AlphaParam(0.0));
    CHECK_NOTHROW(AlphaParam(0.5));
    CHECK_NOTHROW(AlphaParam(0.999999));
    CHECK_THROWS_AS(AlphaParam(-0.1), std::domain_error);
    CHECK_THROWS_AS(AlphaParam(1.0), std::domain_error);
    CHECK_THROWS_AS(AlphaParam(1.5), std::domain_error);
    CHECK_THROWS_AS(AlphaParam(std::nan("")), std::domain_error);
}

TEST_CASE("phi coefficient values") {
    // Gamma(1/2)/Gamma(1/2) = 1, so the raw formula gives 1/(2 pi) at alpha = 1
    CHECK(msqg::phi_formula(1.0) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-13));

    const auto half = msqg::phi_alpha(AlphaParam(0.5));
    REQUIRE(half.phi.has_value());
    CHECK(*half.phi == doctest::Approx(kPhiHalf).epsilon(1e-12));
    CHECK(*half.phi == doctest::Approx(oracles::spouge_phi(0.5)).epsilon(1e-12));
    CHECK(half.alpha_phi == doctest::Approx(0.5 * kPhiHalf).epsilon(1e-12));

    CHECK(*msqg::phi_alpha(AlphaParam(0.25)).phi == doctest::Approx(kPhiQuarter).epsilon(1e-12));
    CHECK(*msqg::phi_alpha(AlphaParam(0.75)).phi ==
          doctest::Approx(kPhiThreeQuarter).epsilon(1e-12));
}

TEST_CASE("alpha*phi(alpha) approaches the Euler constant 1/(2 pi)") {
    const auto tiny = msqg::phi_alpha(AlphaParam(1e-6));
    CHECK(std::abs(tiny.alpha_phi - 1.0 / kTwoPi) / (1.0 / kTwoPi) < 1e-4);

    const auto euler = msqg::phi_alpha(AlphaParam(0.0));
    CHECK_FALSE(euler.phi.has_value());
    CHECK(euler.alpha_phi == 1.0 / kTwoPi);  // exact at alpha = 0
}

TEST_CASE("green function values and homogeneity") {
    const AlphaParam half(0.5);
    CHECK(msqg::green(half, 1.0) == doctest::Approx(kPhiHalf).epsilon(1e-12));
    CHECK(msqg::green(half, 4.0) == doctest::Approx(kPhiHalf / 2.0).epsilon(1e-12));

    const AlphaParam euler(0.0);
    CHECK(msqg::green(euler, 2.0) == doctest::Approx(-std::log(2.0) / kTwoPi).epsilon(1e-13));
    CHECK(msqg::green(euler, 1.0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(msqg::green(half, 0.0), std::domain_error);
    CHECK_THROWS_AS(msqg::green(half, -1.0), std::domain_error);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> alpha_dist(0.01, 0.99);
    std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
    std::uniform_real_distribution<double> r_dist(0.05, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double a = alpha_dist(rng);
        const double lambda = scale_dist(rng);
        const double r = r_dist(rng);
        const AlphaParam ap(a);
        const double lhs = msqg::green(ap, lambda * r);
        const double rhs = std::pow(lambda, -a) * msqg::green(ap, r);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("kernel orthogonality and antisymmetry") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_real_distribution<double> alpha_dist(0.0, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x{coord(rng), coord(rng)};
        if (x.norm() < 1e-6) continue;
        const AlphaParam a(alpha_dist(rng));
        const Vec2 k = msqg::kernel_velocity(a, x);
        CHECK(std::abs(k.dot(x)) <= 1e-12 * k.norm() * x.norm());
        const Vec2 km = msqg::kernel_velocity(a, -x);
        CHECK(km.x == -k.x);
        CHECK(km.y == -k.y);
    }
}

TEST_CASE("kernel value at a frozen point") {
    // K((1,0)) = alpha phi (-0, 1) at unit distance
    const Vec2 k = msqg::kernel_velocity(AlphaParam(0.5), {1.0, 0.0});
    CHECK(k.x == doctest::Approx(0.0));
    CHECK(k.y == doctest::Approx(0.5 * kPhiHalf).epsilon(1e-12));
}

TEST_CASE("kernel homogeneity |K(lambda x)| = lambda^{-(alpha+1)} |K(x)|") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> alpha_dist(0.01, 0.99);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    for (int i = 0; i < 300; ++i) {
        const Vec2 x{coord(rng), coord(rng)};
        if (x.norm() < 1e-3) continue;
        const double a = alpha_dist(rng);
        const double lambda = scale(rng);
        const AlphaParam ap(a);
        const double lhs = msqg::kernel_velocity(ap, lambda * x).norm();
        const double rhs = std::pow(lambda, -(a + 1.0)) * msqg::kernel_velocity(ap, x).norm();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
    }
}

TEST_CASE("kernel Euler consistency as alpha -> 0") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const AlphaParam tiny(1e-4);
    for (int i = 0; i < 100; ++i) {
        const Vec2 x{coord(rng), coord(rng)};
        if (x.norm() < 1e-2) continue;
        const Vec2 k = msqg::kernel_velocity(tiny, x);
        const Vec2 euler = (1.0 / kTwoPi) * x.perp() / x.norm_sq();
        CHECK((k - euler).norm() <= 1e-3 * euler.norm());
    }
}

TEST_CASE("kernel singularity at the origin") {
    CHECK_THROWS_AS(msqg::kernel_velocity(AlphaParam(0.5), {0.0, 0.0}), msqg::SingularityError);
}

TEST_CASE("regularized kernel reduces to the exact kernel at s = 0") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (double a : {0.0, 0.25, 0.5, 0.75, 0.37}) {
        const AlphaParam ap(a);
        for (int i = 0; i < 50; ++i) {
            const Vec2 x{coord(rng), coord(rng)};
            if (x.norm() < 1e-3) continue;
            const Vec2 exact = msqg::kernel_velocity(ap, x);
            const Vec2 reg = msqg::kernel_regularized(ap, 0.0, x);
            CHECK(reg.x == exact.x);
            CHECK(reg.y == exact.y);
        }
    }
}

TEST_CASE("regularized kernel is zero at the origin and total") {
    CHECK(msqg::kernel_regularized(AlphaParam(0.5), 0.1, {0.0, 0.0}) == Vec2{0.0, 0.0});
    CHECK(msqg::kernel_regularized(AlphaParam(0.5), 0.0, {0.0, 0.0}) == Vec2{0.0, 0.0});
    CHECK_THROWS_AS(msqg::kernel_regularized(AlphaParam(0.5), -0.1, {1.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("regularized kernel peak sits at |x| of order s (dense scan)") {
    const double s = 0.1;
    for (double a : {0.25, 0.5, 0.75}) {
        const AlphaParam ap(a);
        double best_r = 0.0, best_v = 0.0;
        for (int i = 1; i <= 100000; ++i) {
            const double r = 10.0 * s * i / 100000.0;
            const double v = msqg::kernel_regularized(ap, s, {r, 0.0}).norm();
            CHECK(std::isfinite(v));
            if (v > best_v) {
                best_v = v;
                best_r = r;
            }
        }
        // stationary point of r (r^2+s^2)^{-(alpha+2)/2} is r = s / sqrt(1+alpha)
        CHECK(best_r == doctest::Approx(s / std::sqrt(1.0 + a)).epsilon(1e-3));
        CHECK(best_v > 0.0);
    }
}

TEST_CASE("regularized kernel converges pointwise to the exact kernel") {
    const AlphaParam a(0.5);
    const Vec2 x{0.7, -0.4};
    const Vec2 exact = msqg::kernel_velocity(a, x);
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 0.4; s > 1e-4; s *= 0.5) {
        const double err = (msqg::kernel_regularized(a, s, x) - exact).norm();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 1e-7 * exact.norm());
}

TEST_CASE("fast power paths agree with the generic pow evaluation") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (double a : {0.0, 0.25, 0.5, 0.75}) {
        const double coef = msqg::phi_alpha(AlphaParam(a)).alpha_phi;
        for (double s : {0.0, 0.05, 0.3}) {
            for (int i = 0; i < 100; ++i) {
                const Vec2 x{coord(rng), coord(rng)};
                if (x.norm() < 1e-3) continue;
                const Vec2 fast = msqg::kernel_regularized(AlphaParam(a), s, x);
                const double q = x.norm_sq() + s * s;
                const Vec2 generic = coef * std::pow(q, -(a + 2.0) / 2.0) * x.perp();
                CHECK((fast - generic).norm() <= 1e-13 * generic.norm());
            }
        }
    }
}

TEST_CASE("KernelSum matches the per-source definition and is target-order independent") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> weight(-2.0, 2.0);
    const AlphaParam a(0.5);
    const double s = 0.03;

    std::vector<Vec2> sources(40);
    std::vector<double> weights(40);
    for (std::size_t k = 0; k < sources.size(); ++k) {
        sources[k] = {coord(rng), coord(rng)};
        weights[k] = weight(rng);
    }
    const KernelSum sum(a, s);

    std::vector<Vec2> targets = {{0.2, 0.1}, {-0.4, 0.9}, {1.4, -1.2}};
    std::vector<Vec2> many(targets.size());
    sum.at_many(targets, sources, weights, many);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        Vec2 manual{0.0, 0.0};
        for (std::size_t k = 0; k < sources.size(); ++k) {
            manual += weights[k] * msqg::kernel_regularized(a, s, targets[t] - sources[k]);
        }
        const Vec2 one = sum.at(targets[t], sources, weights);
        CHECK(one.x == many[t].x);  // same code path, bitwise
        CHECK(one.y == many[t].y);
        CHECK((one - manual).norm() <= 1e-12 * (manual.norm() + 1e-30));
    }
}
