#include "msqg/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msqg {

double beta_bound(AlphaParam alpha) {
    const double a = alpha.value();
    return (2.0 - 2.0 * a) / (4.0 - a);
}

double LocalizationSpec::threshold() const {
    return std::pow(epsilon, beta);
}

std::vector<BlobDiagnostics> compute_blob_diagnostics(const ParticleField& field,
                                                      const std::vector<double>& probe_radii) {
    const int blobs = field.blob_count();
    if (blobs == 0) {
        throw std::domain_error("compute_blob_diagnostics: empty field");
    }
    std::vector<BlobDiagnostics> out;
    out.reserve(blobs);
    for (int b = 0; b < blobs; ++b) {
        const auto [first, last] = field.blob_range(b);
        if (first == last) {
            throw std::domain_error("compute_blob_diagnostics: blob " + std::to_string(b) +
                                    " has no particles");
        }
        BlobDiagnostics d;
        d.time = field.time;
        d.blob_id = b;

        // accumulate relative to a nearby reference to keep the center exact
        // to lattice symmetry (absolute sums lose it to cancellation at scale)
        const Vec2 ref = field.positions[first];
        double mass = 0.0;
        Vec2 center{0.0, 0.0};
        for (std::size_t k = first; k < last; ++k) {
            const double w = std::abs(field.weights[k]);
            mass += w;
            center += w * (field.positions[k] - ref);
        }
        d.center = ref + center / mass;

        double inertia = 0.0;
        double radius = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double w = std::abs(field.weights[k]);
            const double r2 = (field.positions[k] - d.center).norm_sq();
            inertia += w * r2;
            radius = std::max(radius, std::sqrt(r2));
        }
        d.inertia = inertia / mass;
        d.support_radius = radius;

        d.exterior_mass.reserve(probe_radii.size());
        for (const double h : probe_radii) {
            double outside = 0.0;
            for (std::size_t k = first; k < last; ++k) {
                if ((field.positions[k] - d.center).norm() > h) {
                    outside += std::abs(field.weights[k]);
                }
            }
            d.exterior_mass.push_back(outside / mass);
        }
        out.push_back(std::move(d));
    }
    return out;
}

DiagnosticsTracker::DiagnosticsTracker(std::vector<Vec2> initial_centers,
                                       std::vector<ExternalField> fields, double start_time)
    : centers_(std::move(initial_centers)), fields_(std::move(fields)), time_(start_time) {
    if (centers_.size() != fields_.size()) {
        throw std::invalid_argument("DiagnosticsTracker: one external field per blob required");
    }
}

void DiagnosticsTracker::advance(double dt) {
    for (std::size_t b = 0; b < centers_.size(); ++b) {
        const Vec2 z = centers_[b];
        const Vec2 k1 = eval_field(fields_[b], z, time_);
        const Vec2 k2 = eval_field(fields_[b], z + (0.5 * dt) * k1, time_ + 0.5 * dt);
        const Vec2 k3 = eval_field(fields_[b], z + (0.5 * dt) * k2, time_ + 0.5 * dt);
        const Vec2 k4 = eval_field(fields_[b], z + dt * k3, time_ + dt);
        centers_[b] = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    time_ += dt;
}

std::vector<BlobDiagnostics> DiagnosticsTracker::record(const ParticleField& field,
                                                        const std::vector<double>& probe_radii,
                                                        const std::vector<Vec2>* targets) const {
    if (std::abs(field.time - time_) > 1e-9 * std::max(1.0, std::abs(time_))) {
        throw std::invalid_argument("DiagnosticsTracker::record: tracker time " +
                                    std::to_string(time_) + " does not match field time " +
                                    std::to_string(field.time));
    }
    std::vector<BlobDiagnostics> records = compute_blob_diagnostics(field, probe_radii);
    if (records.size() != centers_.size()) {
        throw std::invalid_argument("DiagnosticsTracker::record: blob count mismatch");
    }
    for (std::size_t b = 0; b < records.size(); ++b) {
        records[b].reduced_center = centers_[b];
        if (targets) {
            const auto [first, last] = field.blob_range(static_cast<int>(b));
            double worst = 0.0;
            for (std::size_t k = first; k < last; ++k) {
                worst = std::max(worst, (field.positions[k] - (*targets)[b]).norm());
            }
            records[b].max_tracking_error = worst;
            records[b].has_tracking = true;
        }
    }
    return records;
}

std::optional<double> first_exit(const std::vector<double>& times,
                                 const std::vector<double>& max_err, double threshold,
                                 double offset) {
    if (times.size() != max_err.size()) {
        throw std::invalid_argument("first_exit: series length mismatch");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (max_err[k] + offset >= threshold) {
            return times[k];
        }
    }
    return std::nullopt;
}

LocalizationResult localization_time(const std::vector<BlobHistory>& blob_trajectories,
                                     const std::vector<TargetHistory>& targets,
                                     const LocalizationSpec& spec, double t_max,
                                     double smoothing) {
    if (blob_trajectories.size() != targets.size()) {
        throw std::invalid_argument("localization_time: blob/target count mismatch");
    }
    if (blob_trajectories.empty()) {
        throw std::invalid_argument("localization_time: no blobs");
    }
    const double threshold = spec.threshold();

    LocalizationResult result;
    result.overall_time = t_max;
    result.overall_censored = true;
    for (std::size_t b = 0; b < blob_trajectories.size(); ++b) {
        const BlobHistory& hist = blob_trajectories[b];
        const TargetHistory& target = targets[b];
        if (hist.times.size() != target.times.size() ||
            hist.times.size() != hist.positions.size() ||
            target.times.size() != target.positions.size()) {
            throw std::invalid_argument("localization_time: mismatched sampling grids for blob " +
                                        std::to_string(b));
        }
        for (std::size_t k = 0; k < hist.times.size(); ++k) {
            if (std::abs(hist.times[k] - target.times[k]) >
                1e-9 * std::max(1.0, std::abs(hist.times[k]))) {
                throw std::invalid_argument(
                    "localization_time: mismatched sampling grids for blob " + std::to_string(b));
            }
        }

        std::optional<double> exit;
        for (std::size_t k = 0; k < hist.times.size() && !exit; ++k) {
            if (hist.times[k] > t_max) break;
            for (const Vec2& p : hist.positions[k]) {
                if ((p - target.positions[k]).norm() + smoothing >= threshold) {
                    exit = hist.times[k];
                    break;
                }
            }
        }
        result.exit_times.push_back(exit.value_or(t_max));
        result.censored.push_back(!exit.has_value());
    }
    for (std::size_t b = 0; b < result.exit_times.size(); ++b) {
        result.overall_time = std::min(result.overall_time, result.exit_times[b]);
        result.overall_censored = result.overall_censored && result.censored[b];
    }
    return result;
}

EnvelopeCheck lemma_envelope_check(const std::vector<BlobDiagnostics>& series, double epsilon,
                                   double lipschitz_const, double margin) {
    EnvelopeCheck check;
    const double t0 = series.empty() ? 0.0 : series.front().time;
    for (const BlobDiagnostics& d : series) {
        const double t = d.time - t0;
        const double inertia_cap = 4.0 * epsilon * epsilon * std::exp(2.0 * lipschitz_const * t) * margin;
        const double drift_cap =
            2.0 * epsilon * (1.0 + lipschitz_const * t) * std::exp(lipschitz_const * t) * margin;
        const double inertia_fraction = d.inertia / inertia_cap;
        const double drift = (d.center - d.reduced_center).norm();
        const double drift_fraction = drift / drift_cap;
        check.worst_inertia_fraction = std::max(check.worst_inertia_fraction, inertia_fraction);
        check.worst_center_fraction = std::max(check.worst_center_fraction, drift_fraction);
        if (inertia_fraction > 1.0) check.inertia_ok = false;
        if (drift_fraction > 1.0) check.center_ok = false;
    }
    return check;
}

} // namespace msqg
