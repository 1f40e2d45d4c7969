#ifndef MSQG_DIAGNOSTICS_HPP
#define MSQG_DIAGNOSTICS_HPP

#include <optional>
#include <vector>

#include "msqg/external_field.hpp"
#include "msqg/kernel.hpp"
#include "msqg/scalar_transport.hpp"

namespace msqg {

/// Per-blob observables at one instant. Centers and moments use |w_k|
/// normalized to unit blob mass, so the definitions hold regardless of the
/// blob's sign.
struct BlobDiagnostics {
    double time = 0.0;
    int blob_id = 0;
    Vec2 center{0.0, 0.0};          // B_eps: |w|-weighted particle barycenter
    Vec2 reduced_center{0.0, 0.0};  // B(t): solution of dB/dt = F(B, t)
    double inertia = 0.0;           // I_eps: second moment about the center
    double support_radius = 0.0;    // R: max particle distance from the center
    std::vector<double> exterior_mass;  // m(h) per probe radius, same order
    double max_tracking_error = 0.0;    // max particle distance from the target
    bool has_tracking = false;
};

/// Upper end of the admissible localization exponents: (2 - 2 alpha)/(4 - alpha).
double beta_bound(AlphaParam alpha);

enum class TrackingTarget { pseudo_vortex, reduced_center };

struct LocalizationSpec {
    double epsilon = 0.1;  // must be < 1 for the threshold to shrink with beta
    double beta = 0.2;
    TrackingTarget target = TrackingTarget::pseudo_vortex;
    double threshold() const;  // epsilon^beta
};

/// Static per-blob diagnostics of a particle field (no reduced centers, no
/// tracking). Throws std::domain_error when a blob has no particles.
std::vector<BlobDiagnostics> compute_blob_diagnostics(const ParticleField& field,
                                                      const std::vector<double>& probe_radii);

/// Carries the reduced centers dB/dt = F_i(B, t) alongside a particle run and
/// assembles full per-blob records. One external driver per blob.
class DiagnosticsTracker {
public:
    DiagnosticsTracker(std::vector<Vec2> initial_centers, std::vector<ExternalField> fields,
                       double start_time = 0.0);

    /// RK4 step of every reduced center.
    void advance(double dt);
    double time() const { return time_; }
    const std::vector<Vec2>& reduced_centers() const { return centers_; }

    /// Full records; `targets`, when given, supplies one tracking position per
    /// blob (the pseudo-vortex position or the reduced center) at field.time.
    std::vector<BlobDiagnostics> record(const ParticleField& field,
                                        const std::vector<double>& probe_radii,
                                        const std::vector<Vec2>* targets = nullptr) const;

private:
    std::vector<Vec2> centers_;
    std::vector<ExternalField> fields_;
    double time_;
};

/// First crossing of max_err + offset >= threshold on a sampled series;
/// empty when censored.
std::optional<double> first_exit(const std::vector<double>& times,
                                 const std::vector<double>& max_err, double threshold,
                                 double offset = 0.0);

struct BlobHistory {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;  // positions[sample][particle]
};

struct TargetHistory {
    std::vector<double> times;
    std::vector<Vec2> positions;  // positions[sample]
};

struct LocalizationResult {
    std::vector<double> exit_times;  // per blob; equals t_max when censored
    std::vector<bool> censored;
    double overall_time = 0.0;  // min over blobs
    bool overall_censored = false;
};

/// First time any particle of blob i leaves the tracking disk of radius
/// epsilon^beta around its target (the field smoothing length is added to the
/// particle distance, a conservative support estimate). Histories and targets
/// must share sampling grids; mismatches throw std::invalid_argument.
LocalizationResult localization_time(const std::vector<BlobHistory>& blob_trajectories,
                                     const std::vector<TargetHistory>& targets,
                                     const LocalizationSpec& spec, double t_max,
                                     double smoothing = 0.0);

/// Growth-envelope check of a single-blob record series against
///   I(t)  <= 4 eps^2 exp(2 D t) * margin
///   |B_eps(t) - B(t)| <= 2 eps (1 + D t) exp(D t) * margin
/// for a constant Lipschitz bound D. Ratios are the worst observed fractions
/// of the allowed bounds.
struct EnvelopeCheck {
    bool inertia_ok = true;
    bool center_ok = true;
    double worst_inertia_fraction = 0.0;
    double worst_center_fraction = 0.0;
};

EnvelopeCheck lemma_envelope_check(const std::vector<BlobDiagnostics>& series, double epsilon,
                                   double lipschitz_const, double margin = 1.1);

} // namespace msqg

#endif
