#ifndef MSQG_PSEUDO_VORTEX_HPP
#define MSQG_PSEUDO_VORTEX_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "msqg/kernel.hpp"
#include "msqg/vec2.hpp"

namespace msqg {

/// N point singularities z_i with intensities a_i, evolving by
///   dz_i/dt = sum_{j != i} a_j K(z_i - z_j).
struct PseudoVortexState {
    std::vector<Vec2> positions;
    std::vector<double> intensities;
    double time = 0.0;

    std::size_t size() const { return positions.size(); }
    /// Throws std::invalid_argument on empty/mismatched/zero-intensity states
    /// and SingularityError on coincident positions.
    void validate() const;
    double min_pairwise_distance() const;
    /// Largest pairwise distance (0 for a single vortex).
    double diameter() const;
};

struct ConservedQuantities {
    double hamiltonian;      // sum_{i<j} a_i a_j G(|z_i - z_j|)
    Vec2 linear_impulse;     // sum_i a_i z_i
    double angular_impulse;  // sum_i a_i |z_i|^2
};

enum class EventKind { none, collapse, escape };

struct EventReport {
    EventKind kind = EventKind::none;
    double time = 0.0;
    std::size_t index_a = 0;  // collapse: first of the pair; escape: the vortex
    std::size_t index_b = 0;  // collapse: second of the pair
    double threshold = 0.0;
};

struct EventThresholds {
    double collapse;
    double escape;
    /// Scale-free defaults: collapse at 1e-4 x initial minimum pairwise
    /// distance, escape at 1e4 x initial configuration diameter.
    static EventThresholds defaults_for(const PseudoVortexState& state);
};

/// Sampled trajectory of the point system, one sample per accepted step.
struct PvTrajectory {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;  // positions[sample][vortex]
    std::vector<double> intensities;

    std::size_t samples() const { return times.size(); }
    std::size_t count() const { return intensities.size(); }
    PseudoVortexState state_at(std::size_t sample) const;
    /// Positions at time t, linearly interpolated between samples.
    /// Throws ExtrapolationError outside the sampled span (tiny slack allowed).
    std::vector<Vec2> positions_at(double t) const;
    double min_pair_distance_at(std::size_t sample) const;
};

struct IntegrationResult {
    PvTrajectory trajectory;
    EventReport event;  // kind == none when the horizon was reached
    PseudoVortexState final_state;
};

/// Right-hand side of the point system with the exact kernel.
/// Throws SingularityError (with the offending pair) on coincident points.
std::vector<Vec2> pv_rhs(const PseudoVortexState& state, AlphaParam alpha);

/// H, linear impulse and angular impulse. The Hamiltonian normalization is
/// the generator of the dynamics above: a_i dz_i/dt = grad_perp_i H with
/// grad_perp = (d_2, -d_1) and H = sum_{i<j} a_i a_j G(|z_i - z_j|).
ConservedQuantities hamiltonian(const PseudoVortexState& state, AlphaParam alpha);

/// Fixed-step classical RK4 from state.time to t_end, sampling every step.
/// Negative dt integrates backward (then t_end < state.time is required).
/// Halts early with an EventReport when the collapse or escape threshold is
/// crossed; throws StepRejectedError when an intermediate stage comes below
/// 1e-3 x the collapse threshold (the step size cannot resolve the close
/// approach).
IntegrationResult pv_integrate(const PseudoVortexState& state, AlphaParam alpha, double dt,
                               double t_end, const EventThresholds& thresholds);

/// Conserved-quantity series along a trajectory (for export and drift checks).
std::vector<ConservedQuantities> conserved_series(const PvTrajectory& trajectory, AlphaParam alpha);

/// Trajectory export: columns t, z<i>_x, z<i>_y per vortex, H, impulses; one
/// row per sample (stride > 1 decimates but always emits the final sample).
void write_trajectory_csv(std::ostream& os, const PvTrajectory& trajectory, AlphaParam alpha,
                          std::size_t stride = 1);

} // namespace msqg

#endif
