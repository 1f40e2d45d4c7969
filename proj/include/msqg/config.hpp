#ifndef MSQG_CONFIG_HPP
#define MSQG_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msqg/external_field.hpp"
#include "msqg/scalar_transport.hpp"
#include "msqg/self_similar.hpp"
#include "msqg/vec2.hpp"

namespace msqg {

enum class Scenario {
    single_blob_free,
    single_blob_driven,
    n_blob_localization,
    expanding_triple,
    two_vortex_calibration,
};

std::string scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);
/// (name, one-line description) of every built-in scenario.
std::vector<std::pair<std::string, std::string>> scenario_catalog();

struct ConfigBlob {
    Vec2 center{0.0, 0.0};
    double intensity = 1.0;
    BlobProfile profile = BlobProfile::uniform;
};

struct ConfigVortex {
    Vec2 position{0.0, 0.0};
    double intensity = 1.0;
};

/// Declarative external-field menu. The trajectory-coupled field is built
/// internally by the scenarios and cannot be declared in a file.
struct ConfigFieldSpec {
    enum class Kind { zero, uniform_translation, rigid_rotation, linear_strain };
    Kind kind = Kind::zero;
    Vec2 velocity{0.0, 0.0};
    double omega = 0.0;
    Vec2 center{0.0, 0.0};
    double rate = 0.0;

    ExternalField build() const;
};

struct RunConfig {
    double alpha = 0.5;
    Scenario scenario = Scenario::single_blob_free;
    std::vector<ConfigBlob> blobs;      // defaulted per scenario when absent
    ConfigFieldSpec external;
    std::vector<double> epsilons = {0.1};
    double beta = 0.2;
    double dt = 1e-3;
    double t_end = 1.0;
    int particles_per_diameter = 12;
    std::vector<double> probe_radii = {0.05, 0.1};
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int diag_stride = 10;
    double smoothing_factor = 2.0;
    double max_density = 1.0;
    double growth_factor = 3.0;         // forward growth target of expanding_triple
    std::optional<double> collapse_threshold;
    std::optional<double> escape_threshold;
    bool binary_snapshot = false;
    std::vector<ConfigVortex> vortices; // two_vortex_calibration / explicit triple
    TripleSearchConfig search;
};

struct ValidationResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

/// Parses and validates the declarative run configuration. Returns either a
/// fully defaulted RunConfig or the complete list of violations; unknown keys
/// and sections are rejected by name. Never throws on bad input.
ValidationResult validate_config(const std::string& text);

/// Reads the file and validates. Throws IoError when the file cannot be read.
ValidationResult load_config(const std::string& path);

/// Canonical re-serialization (the config echo written into run outputs).
/// validate_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

} // namespace msqg

#endif
