#include "msqg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "msqg/csv.hpp"
#include "msqg/diagnostics.hpp"
#include "msqg/errors.hpp"

namespace msqg {

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::single_blob_free: return "single_blob_free";
        case Scenario::single_blob_driven: return "single_blob_driven";
        case Scenario::n_blob_localization: return "n_blob_localization";
        case Scenario::expanding_triple: return "expanding_triple";
        case Scenario::two_vortex_calibration: return "two_vortex_calibration";
    }
    return "?";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    for (Scenario s : {Scenario::single_blob_free, Scenario::single_blob_driven,
                       Scenario::n_blob_localization, Scenario::expanding_triple,
                       Scenario::two_vortex_calibration}) {
        if (scenario_name(s) == name) return s;
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> scenario_catalog() {
    return {
        {"single_blob_free",
         "one blob, no external field; checks conservation of the blob center and inertia"},
        {"single_blob_driven",
         "one blob in a declared external field; records the growth envelopes of the center "
         "drift and inertia"},
        {"n_blob_localization",
         "N blobs tracked against the co-evolved point system over a list of blob radii; "
         "measures localization horizons and fits them against |log epsilon|"},
        {"expanding_triple",
         "self-similar expanding three-vortex configuration (searched or supplied); fits the "
         "growth exponent and probes the backward collapse"},
        {"two_vortex_calibration",
         "two-vortex analytic calibration: rotation period (same sign) or translation "
         "(opposite pair)"},
    };
}

ExternalField ConfigFieldSpec::build() const {
    switch (kind) {
        case Kind::zero: return ZeroField{};
        case Kind::uniform_translation: return UniformTranslation{velocity};
        case Kind::rigid_rotation: return RigidRotation{omega, center};
        case Kind::linear_strain: return LinearStrain{rate};
    }
    return ZeroField{};
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto r = std::from_chars(begin, end, out);
    return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& s, long& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto r = std::from_chars(begin, end, out);
    return r.ec == std::errc() && r.ptr == end;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto r = std::from_chars(begin, end, out);
    return r.ec == std::errc() && r.ptr == end;
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1") { out = true; return true; }
    if (s == "false" || s == "0") { out = false; return true; }
    return false;
}

struct Parser {
    RunConfig cfg;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool scenario_seen = false;

    void error(int line, const std::string& msg) {
        errors.push_back("line " + std::to_string(line) + ": " + msg);
    }

    bool get_double(int line, const std::string& key, const std::string& value, double& out) {
        if (!parse_double(value, out)) {
            error(line, "key '" + key + "' expects a number, got '" + value + "'");
            return false;
        }
        return true;
    }

    bool get_vec2(int line, const std::string& key, const std::string& value, Vec2& out) {
        const auto parts = split_list(value);
        double x, y;
        if (parts.size() != 2 || !parse_double(parts[0], x) || !parse_double(parts[1], y)) {
            error(line, "key '" + key + "' expects two numbers, got '" + value + "'");
            return false;
        }
        out = {x, y};
        return true;
    }

    bool get_list(int line, const std::string& key, const std::string& value,
                  std::vector<double>& out) {
        std::vector<double> parsed;
        for (const std::string& item : split_list(value)) {
            double v;
            if (!parse_double(item, v)) {
                error(line, "key '" + key + "' expects a list of numbers, got '" + value + "'");
                return false;
            }
            parsed.push_back(v);
        }
        out = std::move(parsed);
        return true;
    }

    bool get_int(int line, const std::string& key, const std::string& value, int& out) {
        long v;
        if (!parse_int(value, v)) {
            error(line, "key '" + key + "' expects an integer, got '" + value + "'");
            return false;
        }
        out = static_cast<int>(v);
        return true;
    }

    void top_level(int line, const std::string& key, const std::string& value) {
        double d;
        if (key == "alpha") { if (get_double(line, key, value, d)) cfg.alpha = d; }
        else if (key == "scenario") {
            const auto s = scenario_from_name(value);
            if (!s) {
                error(line, "unknown scenario '" + value + "'");
            } else {
                cfg.scenario = *s;
                scenario_seen = true;
            }
        }
        else if (key == "dt") { if (get_double(line, key, value, d)) cfg.dt = d; }
        else if (key == "t_end") { if (get_double(line, key, value, d)) cfg.t_end = d; }
        else if (key == "epsilon") { get_list(line, key, value, cfg.epsilons); }
        else if (key == "beta") { if (get_double(line, key, value, d)) cfg.beta = d; }
        else if (key == "particles_per_diameter") { get_int(line, key, value, cfg.particles_per_diameter); }
        else if (key == "probe_radii") { get_list(line, key, value, cfg.probe_radii); }
        else if (key == "output_dir") {
            if (value.empty()) error(line, "output_dir must not be empty");
            else cfg.output_dir = value;
        }
        else if (key == "seed") {
            std::uint64_t u;
            if (!parse_u64(value, u)) error(line, "key 'seed' expects an unsigned integer");
            else cfg.seed = u;
        }
        else if (key == "diag_stride") { get_int(line, key, value, cfg.diag_stride); }
        else if (key == "smoothing_factor") { if (get_double(line, key, value, d)) cfg.smoothing_factor = d; }
        else if (key == "max_density") { if (get_double(line, key, value, d)) cfg.max_density = d; }
        else if (key == "growth_factor") { if (get_double(line, key, value, d)) cfg.growth_factor = d; }
        else if (key == "collapse_threshold") { if (get_double(line, key, value, d)) cfg.collapse_threshold = d; }
        else if (key == "escape_threshold") { if (get_double(line, key, value, d)) cfg.escape_threshold = d; }
        else if (key == "binary_snapshot") {
            bool b;
            if (!parse_bool(value, b)) error(line, "key 'binary_snapshot' expects true or false");
            else cfg.binary_snapshot = b;
        }
        else { error(line, "unknown key '" + key + "'"); }
    }

    void blob_key(int line, ConfigBlob& blob, const std::string& key, const std::string& value) {
        double d;
        if (key == "center") { get_vec2(line, key, value, blob.center); }
        else if (key == "intensity") { if (get_double(line, key, value, d)) blob.intensity = d; }
        else if (key == "profile") {
            if (value == "uniform") blob.profile = BlobProfile::uniform;
            else if (value == "radial_taper") blob.profile = BlobProfile::radial_taper;
            else error(line, "unknown profile '" + value + "' (uniform|radial_taper)");
        }
        else { error(line, "unknown key '" + key + "' in [blob]"); }
    }

    void vortex_key(int line, ConfigVortex& vortex, const std::string& key, const std::string& value) {
        double d;
        if (key == "position") { get_vec2(line, key, value, vortex.position); }
        else if (key == "intensity") { if (get_double(line, key, value, d)) vortex.intensity = d; }
        else { error(line, "unknown key '" + key + "' in [vortex]"); }
    }

    void field_key(int line, const std::string& key, const std::string& value) {
        double d;
        if (key == "kind") {
            if (value == "zero") cfg.external.kind = ConfigFieldSpec::Kind::zero;
            else if (value == "uniform_translation") cfg.external.kind = ConfigFieldSpec::Kind::uniform_translation;
            else if (value == "rigid_rotation") cfg.external.kind = ConfigFieldSpec::Kind::rigid_rotation;
            else if (value == "linear_strain") cfg.external.kind = ConfigFieldSpec::Kind::linear_strain;
            else if (value == "other_vortices")
                error(line, "field kind 'other_vortices' is built internally by scenarios and "
                            "cannot be declared");
            else error(line, "unknown field kind '" + value + "'");
        }
        else if (key == "velocity") { get_vec2(line, key, value, cfg.external.velocity); }
        else if (key == "omega") { if (get_double(line, key, value, d)) cfg.external.omega = d; }
        else if (key == "center") { get_vec2(line, key, value, cfg.external.center); }
        else if (key == "rate") { if (get_double(line, key, value, d)) cfg.external.rate = d; }
        else { error(line, "unknown key '" + key + "' in [external_field]"); }
    }

    void search_key(int line, const std::string& key, const std::string& value) {
        double d;
        if (key == "ratio_min") { if (get_double(line, key, value, d)) cfg.search.ratio_min = d; }
        else if (key == "ratio_max") { if (get_double(line, key, value, d)) cfg.search.ratio_max = d; }
        else if (key == "grid") { get_int(line, key, value, cfg.search.grid); }
        else if (key == "intensity_min") { if (get_double(line, key, value, d)) cfg.search.intensity_min = d; }
        else if (key == "intensity_max") { if (get_double(line, key, value, d)) cfg.search.intensity_max = d; }
        else if (key == "residual_tol") { if (get_double(line, key, value, d)) cfg.search.residual_tol = d; }
        else if (key == "horizon_growth") { if (get_double(line, key, value, d)) cfg.search.horizon_growth = d; }
        else if (key == "refine_iters") { get_int(line, key, value, cfg.search.refine_iters); }
        else { error(line, "unknown key '" + key + "' in [search]"); }
    }
};

} // namespace

ValidationResult validate_config(const std::string& text) {
    Parser p;
    enum class Section { top, blob, vortex, external_field, search };
    Section section = Section::top;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') {
                p.error(line, "malformed section header '" + s + "'");
                continue;
            }
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name == "blob") {
                section = Section::blob;
                p.cfg.blobs.push_back({});
            } else if (name == "vortex") {
                section = Section::vortex;
                p.cfg.vortices.push_back({});
            } else if (name == "external_field") {
                section = Section::external_field;
            } else if (name == "search") {
                section = Section::search;
            } else {
                p.error(line, "unknown section '[" + name + "]'");
                section = Section::top;
            }
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            p.error(line, "expected 'key = value', got '" + s + "'");
            continue;
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            p.error(line, "missing key before '='");
            continue;
        }

        switch (section) {
            case Section::top: p.top_level(line, key, value); break;
            case Section::blob: p.blob_key(line, p.cfg.blobs.back(), key, value); break;
            case Section::vortex: p.vortex_key(line, p.cfg.vortices.back(), key, value); break;
            case Section::external_field: p.field_key(line, key, value); break;
            case Section::search: p.search_key(line, key, value); break;
        }
    }

    if (!p.scenario_seen) {
        p.errors.insert(p.errors.begin(), "required key 'scenario' is missing");
    }

    RunConfig& c = p.cfg;
    auto err = [&](const std::string& m) { p.errors.push_back(m); };
    auto warn = [&](const std::string& m) { p.warnings.push_back(m); };

    // scenario defaults for absent sections
    const bool blob_scenario = c.scenario == Scenario::single_blob_free ||
                               c.scenario == Scenario::single_blob_driven ||
                               c.scenario == Scenario::n_blob_localization;
    if (blob_scenario && c.blobs.empty()) {
        c.blobs.push_back({{0.0, 0.0}, 1.0, BlobProfile::uniform});
    }
    if (c.scenario == Scenario::two_vortex_calibration && c.vortices.empty()) {
        c.vortices.push_back({{-0.5, 0.0}, 1.0});
        c.vortices.push_back({{0.5, 0.0}, 1.0});
    }

    if (!(c.alpha >= 0.0 && c.alpha < 1.0)) err("alpha must lie in [0, 1)");
    if (!(c.dt > 0.0)) err("dt must be positive");
    if (!(c.t_end > 0.0)) err("t_end must be positive");
    if (c.epsilons.empty()) err("epsilon list must not be empty");
    for (double e : c.epsilons) {
        if (!(e > 0.0 && e < 1.0)) {
            err("epsilon value " + csv::num(e) + " must lie in (0, 1)");
        }
    }
    if (!(c.beta > 0.0 && c.beta < 0.5)) err("beta must lie in (0, 1/2)");
    if (c.particles_per_diameter < 8) err("particles_per_diameter must be >= 8");
    for (double h : c.probe_radii) {
        if (!(h >= 0.0)) err("probe radius " + csv::num(h) + " must be nonnegative");
    }
    if (c.diag_stride < 1) err("diag_stride must be >= 1");
    if (!(c.smoothing_factor > 0.0)) err("smoothing_factor must be positive");
    if (!(c.max_density > 0.0)) err("max_density must be positive");
    if (!(c.growth_factor > 1.0)) err("growth_factor must be > 1");
    if (c.collapse_threshold && !(*c.collapse_threshold > 0.0)) err("collapse_threshold must be positive");
    if (c.escape_threshold && !(*c.escape_threshold > 0.0)) err("escape_threshold must be positive");

    if (c.alpha >= 0.0 && c.alpha < 1.0 && c.beta > 0.0 && c.beta < 0.5) {
        const double bound = beta_bound(AlphaParam(c.alpha));
        if (c.beta >= bound) {
            warn("beta = " + csv::num(c.beta) + " is out of the admissible regime (bound " +
                 csv::num(bound) + " at alpha = " + csv::num(c.alpha) +
                 "); the run executes but is labeled out-of-regime");
        }
    }

    if (blob_scenario) {
        const double eps_max = c.epsilons.empty()
                                   ? 0.0
                                   : *std::max_element(c.epsilons.begin(), c.epsilons.end());
        for (std::size_t i = 0; i < c.blobs.size(); ++i) {
            if (c.blobs[i].intensity == 0.0) {
                err("blob " + std::to_string(i) + " intensity must be nonzero");
            }
            const double peak =
                (c.blobs[i].profile == BlobProfile::uniform ? 1.0 : 3.0) *
                std::abs(c.blobs[i].intensity) / 3.14159265358979323846;
            if (peak > c.max_density) {
                err("blob " + std::to_string(i) +
                    " profile peak exceeds max_density (needs max_density >= " + csv::num(peak) +
                    ")");
            }
            for (std::size_t j = i + 1; j < c.blobs.size(); ++j) {
                if (!(distance(c.blobs[i].center, c.blobs[j].center) > 2.0 * eps_max)) {
                    err("blobs " + std::to_string(i) + " and " + std::to_string(j) +
                        " are not disjoint at the largest epsilon");
                }
            }
        }
        if ((c.scenario == Scenario::single_blob_free ||
             c.scenario == Scenario::single_blob_driven)) {
            if (c.blobs.size() != 1) err("single-blob scenarios take exactly one [blob]");
            if (c.epsilons.size() > 1) {
                warn("single-blob scenarios use only the first epsilon of the list");
            }
        }
        if (!c.vortices.empty()) {
            warn("[vortex] sections are ignored by blob scenarios");
        }
    }

    if (c.scenario == Scenario::two_vortex_calibration) {
        if (c.vortices.size() != 2) {
            err("two_vortex_calibration takes exactly two [vortex] sections");
        } else {
            if (c.vortices[0].intensity == 0.0 || c.vortices[1].intensity == 0.0) {
                err("vortex intensities must be nonzero");
            }
            if (c.vortices[0].position == c.vortices[1].position) {
                err("the two vortices must not coincide");
            }
        }
    }

    if (c.scenario == Scenario::expanding_triple) {
        if (!(c.vortices.empty() || c.vortices.size() == 3)) {
            err("expanding_triple takes either no [vortex] sections (search) or exactly three");
        }
        for (std::size_t i = 0; i < c.vortices.size(); ++i) {
            if (c.vortices[i].intensity == 0.0) {
                err("vortex " + std::to_string(i) + " intensity must be nonzero");
            }
        }
        if (!(c.search.ratio_min > 0.0) || !(c.search.ratio_max > c.search.ratio_min)) {
            err("search ratio window must satisfy 0 < ratio_min < ratio_max");
        }
        if (c.search.grid < 4) err("search grid must be >= 4");
        if (!(c.search.residual_tol > 0.0)) err("search residual_tol must be positive");
        if (!(c.search.horizon_growth > 1.0)) err("search horizon_growth must be > 1");
        if (c.search.refine_iters < 0) err("search refine_iters must be >= 0");
        if (!(c.search.intensity_min < c.search.intensity_max)) {
            err("search intensity window must satisfy intensity_min < intensity_max");
        }
    }

    if (c.scenario == Scenario::single_blob_driven &&
        c.external.kind == ConfigFieldSpec::Kind::zero) {
        warn("single_blob_driven with a zero field is equivalent to single_blob_free");
    }

    ValidationResult result;
    result.errors = std::move(p.errors);
    result.warnings = std::move(p.warnings);
    if (result.errors.empty()) {
        result.config = std::move(p.cfg);
    }
    return result;
}

ValidationResult load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return validate_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += csv::num(v[i]);
        }
        return s;
    };
    os << "scenario = " << scenario_name(c.scenario) << '\n';
    os << "alpha = " << csv::num(c.alpha) << '\n';
    os << "dt = " << csv::num(c.dt) << '\n';
    os << "t_end = " << csv::num(c.t_end) << '\n';
    os << "epsilon = " << list(c.epsilons) << '\n';
    os << "beta = " << csv::num(c.beta) << '\n';
    os << "particles_per_diameter = " << c.particles_per_diameter << '\n';
    os << "probe_radii = " << list(c.probe_radii) << '\n';
    os << "output_dir = " << c.output_dir << '\n';
    os << "seed = " << c.seed << '\n';
    os << "diag_stride = " << c.diag_stride << '\n';
    os << "smoothing_factor = " << csv::num(c.smoothing_factor) << '\n';
    os << "max_density = " << csv::num(c.max_density) << '\n';
    os << "growth_factor = " << csv::num(c.growth_factor) << '\n';
    if (c.collapse_threshold) os << "collapse_threshold = " << csv::num(*c.collapse_threshold) << '\n';
    if (c.escape_threshold) os << "escape_threshold = " << csv::num(*c.escape_threshold) << '\n';
    os << "binary_snapshot = " << (c.binary_snapshot ? "true" : "false") << '\n';

    for (const ConfigBlob& b : c.blobs) {
        os << "\n[blob]\n";
        os << "center = " << csv::num(b.center.x) << ' ' << csv::num(b.center.y) << '\n';
        os << "intensity = " << csv::num(b.intensity) << '\n';
        os << "profile = " << (b.profile == BlobProfile::uniform ? "uniform" : "radial_taper")
           << '\n';
    }
    for (const ConfigVortex& v : c.vortices) {
        os << "\n[vortex]\n";
        os << "position = " << csv::num(v.position.x) << ' ' << csv::num(v.position.y) << '\n';
        os << "intensity = " << csv::num(v.intensity) << '\n';
    }

    os << "\n[external_field]\n";
    switch (c.external.kind) {
        case ConfigFieldSpec::Kind::zero:
            os << "kind = zero\n";
            break;
        case ConfigFieldSpec::Kind::uniform_translation:
            os << "kind = uniform_translation\n";
            os << "velocity = " << csv::num(c.external.velocity.x) << ' '
               << csv::num(c.external.velocity.y) << '\n';
            break;
        case ConfigFieldSpec::Kind::rigid_rotation:
            os << "kind = rigid_rotation\n";
            os << "omega = " << csv::num(c.external.omega) << '\n';
            os << "center = " << csv::num(c.external.center.x) << ' '
               << csv::num(c.external.center.y) << '\n';
            break;
        case ConfigFieldSpec::Kind::linear_strain:
            os << "kind = linear_strain\n";
            os << "rate = " << csv::num(c.external.rate) << '\n';
            break;
    }

    os << "\n[search]\n";
    os << "ratio_min = " << csv::num(c.search.ratio_min) << '\n';
    os << "ratio_max = " << csv::num(c.search.ratio_max) << '\n';
    os << "grid = " << c.search.grid << '\n';
    os << "intensity_min = " << csv::num(c.search.intensity_min) << '\n';
    os << "intensity_max = " << csv::num(c.search.intensity_max) << '\n';
    os << "residual_tol = " << csv::num(c.search.residual_tol) << '\n';
    os << "horizon_growth = " << csv::num(c.search.horizon_growth) << '\n';
    os << "refine_iters = " << c.search.refine_iters << '\n';
    return os.str();
}

} // namespace msqg
