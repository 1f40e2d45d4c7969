#include "msqg/scalar_transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "msqg/csv.hpp"

namespace msqg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double profile_density(const BlobSpec& spec, double r) {
    const double eps = spec.radius;
    switch (spec.profile) {
        case BlobProfile::uniform:
            return spec.intensity / (kPi * eps * eps);
        case BlobProfile::radial_taper: {
            const double u = 1.0 - (r / eps) * (r / eps);
            return 3.0 * spec.intensity / (kPi * eps * eps) * u * u;
        }
    }
    return 0.0;
}

double profile_peak(const BlobSpec& spec) {
    switch (spec.profile) {
        case BlobProfile::uniform:
            return std::abs(spec.intensity) / (kPi * spec.radius * spec.radius);
        case BlobProfile::radial_taper:
            return 3.0 * std::abs(spec.intensity) / (kPi * spec.radius * spec.radius);
    }
    return 0.0;
}

} // namespace

int ParticleField::blob_count() const {
    return blob_id.empty() ? 0 : blob_id.back() + 1;
}

std::pair<std::size_t, std::size_t> ParticleField::blob_range(int id) const {
    const auto lo = std::lower_bound(blob_id.begin(), blob_id.end(), id);
    const auto hi = std::upper_bound(blob_id.begin(), blob_id.end(), id);
    return {static_cast<std::size_t>(lo - blob_id.begin()),
            static_cast<std::size_t>(hi - blob_id.begin())};
}

ParticleField init_blobs(const std::vector<BlobSpec>& specs, int particles_per_diameter,
                         double smoothing_factor) {
    if (specs.empty()) {
        throw std::invalid_argument("init_blobs: no blobs given");
    }
    if (particles_per_diameter < 8) {
        throw std::invalid_argument("init_blobs: particles_per_diameter must be >= 8");
    }
    if (!(smoothing_factor > 0.0)) {
        throw std::invalid_argument("init_blobs: smoothing factor must be positive");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!(specs[i].radius > 0.0)) {
            throw std::invalid_argument("init_blobs: blob " + std::to_string(i) +
                                        " has non-positive radius");
        }
        if (specs[i].intensity == 0.0) {
            throw std::invalid_argument("init_blobs: blob " + std::to_string(i) +
                                        " has zero intensity");
        }
        if (profile_peak(specs[i]) > specs[i].max_density / (specs[i].radius * specs[i].radius)) {
            throw std::invalid_argument(
                "init_blobs: blob " + std::to_string(i) +
                " profile peak violates the density cap max_density/radius^2");
        }
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const double gap = distance(specs[i].center, specs[j].center);
            if (!(gap > specs[i].radius + specs[j].radius)) {
                throw std::invalid_argument("init_blobs: blobs " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are not disjoint");
            }
        }
    }

    ParticleField field;
    double max_spacing = 0.0;
    for (std::size_t b = 0; b < specs.size(); ++b) {
        const BlobSpec& spec = specs[b];
        const double h = 2.0 * spec.radius / particles_per_diameter;
        max_spacing = std::max(max_spacing, h);
        const std::size_t first = field.positions.size();
        const int m = particles_per_diameter / 2 + 1;
        // cell-centered lattice, symmetric about the blob center
        for (int i = -m; i < m; ++i) {
            for (int j = -m; j < m; ++j) {
                const double ox = (i + 0.5) * h;
                const double oy = (j + 0.5) * h;
                const double r = std::sqrt(ox * ox + oy * oy);
                if (r >= spec.radius) continue;
                field.positions.push_back(spec.center + Vec2{ox, oy});
                field.weights.push_back(profile_density(spec, r) * h * h);
                field.blob_id.push_back(static_cast<int>(b));
            }
        }
        const std::size_t last = field.positions.size();
        if (last == first) {
            throw std::invalid_argument("init_blobs: blob " + std::to_string(b) +
                                        " received no lattice nodes");
        }
        double total = 0.0;
        for (std::size_t k = first; k < last; ++k) total += field.weights[k];
        const double scale = spec.intensity / total;
        for (std::size_t k = first; k < last; ++k) field.weights[k] *= scale;
    }
    field.smoothing = smoothing_factor * max_spacing;
    field.time = 0.0;
    return field;
}

Vec2 field_velocity(const ParticleField& field, AlphaParam alpha, Vec2 point) {
    if (field.positions.empty()) {
        throw std::invalid_argument("field_velocity: empty field");
    }
    const KernelSum sum(alpha, field.smoothing);
    return sum.at(point, field.positions, field.weights);
}

std::vector<Vec2> self_velocities(const ParticleField& field, AlphaParam alpha) {
    std::vector<Vec2> out(field.particle_count());
    const KernelSum sum(alpha, field.smoothing);
    sum.at_many(field.positions, field.positions, field.weights, out);
    return out;
}

ParticleField advect_step(const ParticleField& field, AlphaParam alpha,
                          const ExternalField& external, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("advect_step: dt must be positive");
    }
    const std::size_t n = field.particle_count();
    const KernelSum sum(alpha, field.smoothing);

    std::vector<Vec2> stage = field.positions;
    std::vector<Vec2> vel(n);
    auto eval_stage = [&](const std::vector<Vec2>& pos, double t, std::vector<Vec2>& out) {
        sum.at_many(pos, pos, field.weights, out);
        for (std::size_t k = 0; k < n; ++k) {
            out[k] += eval_field(external, pos[k], t);
        }
    };

    std::vector<Vec2> k1(n), k2(n), k3(n), k4(n);
    const double t = field.time;
    eval_stage(field.positions, t, k1);
    for (std::size_t k = 0; k < n; ++k) stage[k] = field.positions[k] + (0.5 * dt) * k1[k];
    eval_stage(stage, t + 0.5 * dt, k2);
    for (std::size_t k = 0; k < n; ++k) stage[k] = field.positions[k] + (0.5 * dt) * k2[k];
    eval_stage(stage, t + 0.5 * dt, k3);
    for (std::size_t k = 0; k < n; ++k) stage[k] = field.positions[k] + dt * k3[k];
    eval_stage(stage, t + dt, k4);

    ParticleField next = field;
    for (std::size_t k = 0; k < n; ++k) {
        next.positions[k] += (dt / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    next.time = field.time + dt;
    return next;
}

void write_snapshot_csv(std::ostream& os, const ParticleField& field) {
    os << "t,blob_id,x_1,x_2,w\n";
    for (std::size_t k = 0; k < field.particle_count(); ++k) {
        os << csv::num(field.time) << ',' << field.blob_id[k] << ',' << csv::num(field.positions[k].x)
           << ',' << csv::num(field.positions[k].y) << ',' << csv::num(field.weights[k]) << '\n';
    }
}

namespace {

constexpr char kSnapshotMagic[8] = {'M', 'S', 'Q', 'G', 'P', 'A', 'R', 'T'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void write_snapshot_binary(std::ostream& os, const ParticleField& field, double alpha) {
    os.write(kSnapshotMagic, 8);
    put_u64(os, field.particle_count());
    put_f64(os, alpha);
    put_f64(os, field.smoothing);
    put_f64(os, field.time);
    for (std::size_t k = 0; k < field.particle_count(); ++k) {
        put_f64(os, field.positions[k].x);
        put_f64(os, field.positions[k].y);
        put_f64(os, field.weights[k]);
        put_u64(os, static_cast<std::uint64_t>(field.blob_id[k]));
    }
}

ParticleField read_snapshot_binary(std::istream& is, double* alpha_out) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kSnapshotMagic, 8) != 0) {
        throw std::runtime_error("read_snapshot_binary: bad magic");
    }
    const std::uint64_t n = get_u64(is);
    const double alpha = get_f64(is);
    ParticleField field;
    field.smoothing = get_f64(is);
    field.time = get_f64(is);
    field.positions.resize(n);
    field.weights.resize(n);
    field.blob_id.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        field.positions[k].x = get_f64(is);
        field.positions[k].y = get_f64(is);
        field.weights[k] = get_f64(is);
        field.blob_id[k] = static_cast<int>(get_u64(is));
    }
    if (!is) {
        throw std::runtime_error("read_snapshot_binary: truncated snapshot");
    }
    if (alpha_out) *alpha_out = alpha;
    return field;
}

} // namespace msqg
