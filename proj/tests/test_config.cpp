#include <doctest.h>

#include <random>
#include <string>

#include "msqg/config.hpp"
#include "msqg/errors.hpp"

using msqg::RunConfig;
using msqg::Scenario;
using msqg::validate_config;

TEST_CASE("minimal config fills documented defaults") {
    const auto v = validate_config("scenario = single_blob_free\n");
    REQUIRE(v.ok());
    const RunConfig& c = *v.config;
    CHECK(c.scenario == Scenario::single_blob_free);
    CHECK(c.alpha == 0.5);
    CHECK(c.dt == 1e-3);
    CHECK(c.t_end == 1.0);
    CHECK(c.epsilons == std::vector<double>{0.1});
    CHECK(c.beta == 0.2);
    CHECK(c.particles_per_diameter == 12);
    CHECK(c.probe_radii == std::vector<double>{0.05, 0.1});
    CHECK(c.output_dir == "out");
    CHECK(c.seed == 0);
    CHECK(c.diag_stride == 10);
    CHECK(c.smoothing_factor == 2.0);
    // a default blob is injected for blob scenarios
    REQUIRE(c.blobs.size() == 1);
    CHECK(c.blobs[0].center == msqg::Vec2{0.0, 0.0});
    CHECK(c.blobs[0].intensity == 1.0);
}

TEST_CASE("missing scenario is an error") {
    const auto v = validate_config("alpha = 0.5\n");
    CHECK_FALSE(v.ok());
    CHECK(v.errors.front().find("scenario") != std::string::npos);
}

TEST_CASE("unknown keys are rejected by name") {
    const auto v = validate_config("scenario = single_blob_free\nviscosity = 0.01\n");
    CHECK_FALSE(v.ok());
    bool named = false;
    for (const auto& e : v.errors) {
        if (e.find("viscosity") != std::string::npos) named = true;
    }
    CHECK(named);
}

TEST_CASE("unknown sections and malformed lines are rejected") {
    const auto v = validate_config("scenario = single_blob_free\n[turbulence]\nmodel = none\n");
    CHECK_FALSE(v.ok());
    CHECK(v.errors.front().find("[turbulence]") != std::string::npos);

    const auto w = validate_config("scenario = single_blob_free\nthis is not a key value\n");
    CHECK_FALSE(w.ok());
}

TEST_CASE("range violations are all enumerated") {
    const auto v = validate_config(
        "scenario = n_blob_localization\n"
        "alpha = 1.4\n"
        "dt = -1\n"
        "beta = 0.7\n"
        "epsilon = 1.5\n"
        "particles_per_diameter = 4\n");
    CHECK_FALSE(v.ok());
    CHECK(v.errors.size() >= 5);
}

TEST_CASE("out-of-regime beta is a warning, not an error") {
    const auto v = validate_config(
        "scenario = n_blob_localization\n"
        "alpha = 0.5\n"
        "beta = 0.4\n"            // bound is 2/7
        "epsilon = 0.1\n"
        "[blob]\ncenter = 0 0\nintensity = 1\n"
        "[blob]\ncenter = 1 0\nintensity = 1\n");
    REQUIRE(v.ok());
    bool warned = false;
    for (const auto& w : v.warnings) {
        if (w.find("out of the admissible regime") != std::string::npos) warned = true;
    }
    CHECK(warned);
}

TEST_CASE("blob disjointness is checked at the largest epsilon") {
    const auto bad = validate_config(
        "scenario = n_blob_localization\n"
        "epsilon = 0.1 0.05\n"
        "[blob]\ncenter = 0 0\nintensity = 1\n"
        "[blob]\ncenter = 0.19 0\nintensity = 1\n");
    CHECK_FALSE(bad.ok());

    const auto good = validate_config(
        "scenario = n_blob_localization\n"
        "epsilon = 0.1 0.05\n"
        "[blob]\ncenter = 0 0\nintensity = 1\n"
        "[blob]\ncenter = 0.21 0\nintensity = 1\n");
    CHECK(good.ok());
}

TEST_CASE("two_vortex_calibration defaults and vortex validation") {
    const auto v = validate_config("scenario = two_vortex_calibration\n");
    REQUIRE(v.ok());
    REQUIRE(v.config->vortices.size() == 2);
    CHECK(v.config->vortices[0].position == msqg::Vec2{-0.5, 0.0});

    const auto bad = validate_config(
        "scenario = two_vortex_calibration\n"
        "[vortex]\nposition = 0 0\nintensity = 1\n");
    CHECK_FALSE(bad.ok());  // exactly two required

    const auto coincident = validate_config(
        "scenario = two_vortex_calibration\n"
        "[vortex]\nposition = 0 0\nintensity = 1\n"
        "[vortex]\nposition = 0 0\nintensity = 1\n");
    CHECK_FALSE(coincident.ok());
}

TEST_CASE("external field parsing") {
    const auto v = validate_config(
        "scenario = single_blob_driven\n"
        "[external_field]\n"
        "kind = rigid_rotation\n"
        "omega = 1.5\n"
        "center = 0.5 0.5\n");
    REQUIRE(v.ok());
    CHECK(v.config->external.kind == msqg::ConfigFieldSpec::Kind::rigid_rotation);
    CHECK(v.config->external.omega == 1.5);

    const auto banned = validate_config(
        "scenario = single_blob_driven\n[external_field]\nkind = other_vortices\n");
    CHECK_FALSE(banned.ok());
}

TEST_CASE("expanding_triple accepts zero or three vortices") {
    CHECK(validate_config("scenario = expanding_triple\n").ok());
    const auto three = validate_config(
        "scenario = expanding_triple\n"
        "[vortex]\nposition = 0 0\nintensity = 1\n"
        "[vortex]\nposition = 1 0\nintensity = 0.5\n"
        "[vortex]\nposition = 0 1\nintensity = -0.3\n");
    CHECK(three.ok());
    const auto two = validate_config(
        "scenario = expanding_triple\n"
        "[vortex]\nposition = 0 0\nintensity = 1\n"
        "[vortex]\nposition = 1 0\nintensity = 0.5\n");
    CHECK_FALSE(two.ok());
}

TEST_CASE("comments, inline comments and blank lines are ignored") {
    const auto v = validate_config(
        "# a comment\n"
        "\n"
        "scenario = single_blob_free  # trailing comment\n"
        "alpha = 0.25\n");
    REQUIRE(v.ok());
    CHECK(v.config->alpha == 0.25);
}

TEST_CASE("serialize -> validate round trip preserves the config") {
    const auto v = validate_config(
        "scenario = n_blob_localization\n"
        "alpha = 0.375\n"
        "dt = 0.00025\n"
        "t_end = 5\n"
        "epsilon = 0.1 0.05 0.025\n"
        "beta = 0.2\n"
        "seed = 42\n"
        "binary_snapshot = true\n"
        "[blob]\ncenter = 0 0\nintensity = 1\n"
        "[blob]\ncenter = 1 0\nintensity = -0.5\n");
    REQUIRE(v.ok());
    const std::string echoed = msqg::serialize_config(*v.config);
    const auto round = validate_config(echoed);
    REQUIRE(round.ok());
    const RunConfig& a = *v.config;
    const RunConfig& b = *round.config;
    CHECK(a.alpha == b.alpha);
    CHECK(a.dt == b.dt);
    CHECK(a.t_end == b.t_end);
    CHECK(a.epsilons == b.epsilons);
    CHECK(a.beta == b.beta);
    CHECK(a.seed == b.seed);
    CHECK(a.binary_snapshot == b.binary_snapshot);
    REQUIRE(a.blobs.size() == b.blobs.size());
    for (std::size_t i = 0; i < a.blobs.size(); ++i) {
        CHECK(a.blobs[i].center == b.blobs[i].center);
        CHECK(a.blobs[i].intensity == b.blobs[i].intensity);
    }
}

TEST_CASE("randomized configs survive the serialize -> validate round trip") {
    std::mt19937 rng(2468);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        RunConfig c;
        c.scenario = Scenario::n_blob_localization;
        c.alpha = 0.999 * unit(rng);
        c.dt = 1e-4 + 1e-2 * unit(rng);
        c.t_end = 0.5 + 10.0 * unit(rng);
        c.beta = 0.05 + 0.4 * unit(rng);
        c.particles_per_diameter = 8 + static_cast<int>(40 * unit(rng));
        c.seed = static_cast<std::uint64_t>(1e9 * unit(rng));
        c.diag_stride = 1 + static_cast<int>(20 * unit(rng));
        c.smoothing_factor = 0.5 + 3.0 * unit(rng);
        c.epsilons.clear();
        const int ne = 1 + static_cast<int>(3 * unit(rng));
        for (int e = 0; e < ne; ++e) c.epsilons.push_back(0.01 + 0.04 * unit(rng) + 0.05 * e);
        c.blobs.clear();
        const int nb = 1 + static_cast<int>(3 * unit(rng));
        for (int b = 0; b < nb; ++b) {
            // spaced centers: always disjoint at the largest epsilon < 0.2
            c.blobs.push_back({{static_cast<double>(b), unit(rng)},
                               unit(rng) > 0.5 ? 1.0 + unit(rng) : -1.0 - unit(rng),
                               msqg::BlobProfile::uniform});
        }
        c.max_density = 2.0;

        const auto round = validate_config(msqg::serialize_config(c));
        REQUIRE_MESSAGE(round.ok(), (round.errors.empty() ? "?" : round.errors.front()));
        const RunConfig& r = *round.config;
        CHECK(r.alpha == c.alpha);
        CHECK(r.dt == c.dt);
        CHECK(r.t_end == c.t_end);
        CHECK(r.beta == c.beta);
        CHECK(r.epsilons == c.epsilons);
        CHECK(r.seed == c.seed);
        CHECK(r.particles_per_diameter == c.particles_per_diameter);
        CHECK(r.diag_stride == c.diag_stride);
        CHECK(r.smoothing_factor == c.smoothing_factor);
        REQUIRE(r.blobs.size() == c.blobs.size());
        for (std::size_t b = 0; b < c.blobs.size(); ++b) {
            CHECK(r.blobs[b].center == c.blobs[b].center);
            CHECK(r.blobs[b].intensity == c.blobs[b].intensity);
        }
    }
}

TEST_CASE("load_config raises IoError for missing files") {
    CHECK_THROWS_AS(msqg::load_config("/nonexistent/path.cfg"), msqg::IoError);
}

TEST_CASE("scenario catalog names resolve") {
    for (const auto& [name, description] : msqg::scenario_catalog()) {
        const auto s = msqg::scenario_from_name(name);
        REQUIRE(s.has_value());
        CHECK(msqg::scenario_name(*s) == name);
        CHECK_FALSE(description.empty());
    }
    CHECK_FALSE(msqg::scenario_from_name("warp_drive").has_value());
}
