#ifndef MSQG_SCALAR_TRANSPORT_HPP
#define MSQG_SCALAR_TRANSPORT_HPP

#include <iosfwd>
#include <vector>

#include "msqg/external_field.hpp"
#include "msqg/kernel.hpp"
#include "msqg/vec2.hpp"

namespace msqg {

enum class BlobProfile { uniform, radial_taper };

/// One compactly supported, sign-definite piece of the initial scalar.
/// max_density is the cap M in |theta| <= M / radius^2; the profile
/// normalization must respect it (uniform needs M >= |intensity|/pi,
/// the taper M >= 3|intensity|/pi).
struct BlobSpec {
    Vec2 center{0.0, 0.0};
    double radius = 0.1;
    double intensity = 1.0;
    BlobProfile profile = BlobProfile::uniform;
    double max_density = 1.0;
};

/// Lagrangian discretization of the active scalar: particle positions move,
/// quadrature weights w_k = theta(x_k, 0) * cell_area never change (the
/// scalar is conserved along trajectories).
struct ParticleField {
    std::vector<Vec2> positions;
    std::vector<double> weights;
    std::vector<int> blob_id;
    double smoothing = 0.0;
    double time = 0.0;

    std::size_t particle_count() const { return positions.size(); }
    int blob_count() const;
    /// Indices [first, last) of a blob's particles (particles are stored
    /// grouped by blob in ascending id order).
    std::pair<std::size_t, std::size_t> blob_range(int id) const;
};

/// Midpoint-rule lattice discretization of the blobs: a square lattice of
/// spacing 2*radius/particles_per_diameter per blob, clipped to the open
/// disk, weights rescaled per blob so the blob total equals the intensity.
/// The field smoothing defaults to smoothing_factor x the largest lattice
/// spacing. Requires particles_per_diameter >= 8 and pairwise disjoint blobs
/// (|z_i - z_j| > r_i + r_j).
ParticleField init_blobs(const std::vector<BlobSpec>& specs, int particles_per_diameter,
                         double smoothing_factor = 2.0);

/// Velocity induced by the whole field at one point, direct summation with
/// the mollified kernel in fixed particle order.
Vec2 field_velocity(const ParticleField& field, AlphaParam alpha, Vec2 point);

/// Self-induced velocity at every particle (shared smoothing, fixed order).
std::vector<Vec2> self_velocities(const ParticleField& field, AlphaParam alpha);

/// One RK4 step of dx/dt = u(x, t) + F(x, t), the velocity re-evaluated
/// self-consistently at each stage. Weights and blob ids are untouched.
ParticleField advect_step(const ParticleField& field, AlphaParam alpha,
                          const ExternalField& external, double dt);

/// Snapshot export: CSV columns t, blob_id, x_1, x_2, w.
void write_snapshot_csv(std::ostream& os, const ParticleField& field);

/// Binary snapshot for restart: little-endian, 64-bit floats, header with
/// particle count, alpha, smoothing and time.
void write_snapshot_binary(std::ostream& os, const ParticleField& field, double alpha);
ParticleField read_snapshot_binary(std::istream& is, double* alpha_out = nullptr);

} // namespace msqg

#endif
