#include "msqg/scenario.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "msqg/csv.hpp"
#include "msqg/diagnostics.hpp"
#include "msqg/errors.hpp"
#include "msqg/self_similar.hpp"

namespace msqg {

namespace fs = std::filesystem;

bool RunReport::all_invariants_pass() const {
    for (const InvariantCheck& c : invariants) {
        if (!c.pass) return false;
    }
    return true;
}

std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares_line: need at least two points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) {
        throw std::invalid_argument("least_squares_line: degenerate abscissae");
    }
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    return {intercept, slope};
}

namespace {

constexpr double kPi = 3.14159265358979323846;

class OutputDir {
public:
    OutputDir(const std::string& dir, RunReport& report) : dir_(dir), report_(report) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory '" + dir + "': " + ec.message());
        }
    }

    std::ofstream open(const std::string& name, bool binary = false) {
        const fs::path path = fs::path(dir_) / name;
        std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!os) {
            throw IoError("cannot open output file '" + path.string() + "'");
        }
        report_.manifest.push_back(name);
        return os;
    }

    void verify_manifest() const {
        for (const std::string& name : report_.manifest) {
            const fs::path path = fs::path(dir_) / name;
            std::error_code ec;
            const auto size = fs::file_size(path, ec);
            if (ec || size == 0) {
                throw IoError("manifest file '" + path.string() + "' is missing or empty");
            }
        }
    }

private:
    std::string dir_;
    RunReport& report_;
};

// one row per sample step up to a size guard on very long runs
std::size_t trajectory_stride(const PvTrajectory& traj) {
    constexpr std::size_t kMaxRows = 200000;
    return traj.samples() <= kMaxRows ? 1 : (traj.samples() + kMaxRows - 1) / kMaxRows;
}

void write_diagnostics_header(std::ostream& os, const std::vector<double>& probe_radii) {
    os << "t,blob_id,B1,B2,Bred1,Bred2,I,R";
    for (const double h : probe_radii) {
        os << ",m@" << csv::num(h);
    }
    os << ",max_tracking_error\n";
}

void write_diagnostics_rows(std::ostream& os, const std::vector<BlobDiagnostics>& records) {
    for (const BlobDiagnostics& d : records) {
        os << csv::num(d.time) << ',' << d.blob_id << ',' << csv::num(d.center.x) << ','
           << csv::num(d.center.y) << ',' << csv::num(d.reduced_center.x) << ','
           << csv::num(d.reduced_center.y) << ',' << csv::num(d.inertia) << ','
           << csv::num(d.support_radius);
        for (const double m : d.exterior_mass) {
            os << ',' << csv::num(m);
        }
        os << ',' << csv::num(d.has_tracking ? d.max_tracking_error : 0.0) << '\n';
    }
}

void add_check(RunReport& report, const std::string& name, bool pass, double value, double bound) {
    report.invariants.push_back({name, pass, value, bound});
}

EventThresholds thresholds_for(const RunConfig& config, const PseudoVortexState& state) {
    EventThresholds thr = EventThresholds::defaults_for(state);
    if (config.collapse_threshold) thr.collapse = *config.collapse_threshold;
    if (config.escape_threshold) thr.escape = *config.escape_threshold;
    return thr;
}

std::string event_text(const EventReport& event) {
    std::ostringstream os;
    if (event.kind == EventKind::collapse) {
        os << "collapse of pair (" << event.index_a << ", " << event.index_b << ") at t = "
           << csv::num(event.time) << " (threshold " << csv::num(event.threshold) << ")";
    } else {
        os << "escape of vortex " << event.index_a << " at t = " << csv::num(event.time)
           << " (threshold " << csv::num(event.threshold) << ")";
    }
    return os.str();
}

void conservation_checks(RunReport& report, const PvTrajectory& traj, AlphaParam alpha) {
    const auto series = conserved_series(traj, alpha);
    double h_drift = 0.0, ang_drift = 0.0, lin_drift = 0.0;
    const ConservedQuantities q0 = series.front();
    for (const ConservedQuantities& q : series) {
        h_drift = std::max(h_drift, std::abs(q.hamiltonian - q0.hamiltonian));
        ang_drift = std::max(ang_drift, std::abs(q.angular_impulse - q0.angular_impulse));
        lin_drift = std::max(lin_drift, (q.linear_impulse - q0.linear_impulse).norm());
    }
    double abs_sum = 0.0;
    for (const double a : traj.intensities) abs_sum += std::abs(a);
    const double diam = std::max(traj.state_at(0).diameter(), 1e-300);
    const double h_scale = std::max(std::abs(q0.hamiltonian), 1e-300);
    const double ang_scale = std::max(std::abs(q0.angular_impulse), 1e-300);
    add_check(report, "hamiltonian_relative_drift", h_drift / h_scale <= 1e-6, h_drift / h_scale,
              1e-6);
    add_check(report, "angular_impulse_relative_drift", ang_drift / ang_scale <= 1e-6,
              ang_drift / ang_scale, 1e-6);
    add_check(report, "linear_impulse_drift", lin_drift <= 1e-8 * abs_sum * diam, lin_drift,
              1e-8 * abs_sum * diam);
}

// ---------------------------------------------------------------- scenarios

void run_two_vortex(const RunConfig& config, RunReport& report, OutputDir& out) {
    const AlphaParam alpha(config.alpha);
    PseudoVortexState state;
    for (const ConfigVortex& v : config.vortices) {
        state.positions.push_back(v.position);
        state.intensities.push_back(v.intensity);
    }
    const double a1 = state.intensities[0];
    const double a2 = state.intensities[1];
    const double d0 = distance(state.positions[0], state.positions[1]);
    const double coef = phi_alpha(alpha).alpha_phi;

    const EventThresholds thr = thresholds_for(config, state);
    IntegrationResult r = pv_integrate(state, alpha, config.dt, config.t_end, thr);
    report.total_steps += static_cast<long>(r.trajectory.samples()) - 1;
    {
        auto os = out.open("trajectory.csv");
        write_trajectory_csv(os, r.trajectory, alpha);
    }
    if (r.event.kind != EventKind::none) {
        report.aborted = true;
        report.abort_reason = event_text(r.event);
        return;
    }

    conservation_checks(report, r.trajectory, alpha);

    if (a1 + a2 != 0.0) {
        // rotation about the fixed center of intensity with angular rate
        // (a1 + a2) alpha*phi / d^{alpha + 2}
        report.predicted_period = 2.0 * kPi * std::pow(d0, config.alpha + 2.0) /
                                  (std::abs(a1 + a2) * coef);
        double total_angle = 0.0;
        double prev = 0.0;
        for (std::size_t s = 0; s < r.trajectory.samples(); ++s) {
            const Vec2 sep = r.trajectory.positions[s][0] - r.trajectory.positions[s][1];
            const double angle = std::atan2(sep.y, sep.x);
            if (s > 0) {
                double delta = angle - prev;
                while (delta > kPi) delta -= 2.0 * kPi;
                while (delta < -kPi) delta += 2.0 * kPi;
                total_angle += delta;
            }
            prev = angle;
        }
        const double span = r.trajectory.times.back() - r.trajectory.times.front();
        report.measured_period = 2.0 * kPi * span / std::abs(total_angle);
        const double rel = std::abs(report.measured_period - report.predicted_period) /
                           report.predicted_period;
        add_check(report, "two_vortex_period", rel <= 1e-4, rel, 1e-4);
    } else {
        // opposite pair: uniform translation at speed |a| alpha*phi / d^{alpha+1}
        double drift = 0.0;
        for (std::size_t s = 0; s < r.trajectory.samples(); ++s) {
            const double d = distance(r.trajectory.positions[s][0], r.trajectory.positions[s][1]);
            drift = std::max(drift, std::abs(d - d0) / d0);
        }
        report.separation_drift = drift;
        add_check(report, "pair_separation_drift", drift <= 1e-8, drift, 1e-8);

        const double span = r.trajectory.times.back() - r.trajectory.times.front();
        const Vec2 moved = r.trajectory.positions.back()[0] - r.trajectory.positions.front()[0];
        const double speed = moved.norm() / span;
        const double predicted = std::abs(a1) * coef / std::pow(d0, config.alpha + 1.0);
        const double rel = std::abs(speed - predicted) / predicted;
        add_check(report, "pair_translation_speed", rel <= 1e-6, rel, 1e-6);
    }
}

struct BlobRunSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> max_err;  // [blob][sample]
    std::vector<std::vector<BlobDiagnostics>> records;  // [blob][sample]
};

// Advances one particle field to t_end with diagnostics at the given stride.
// `targets_at` may be null (no tracking); otherwise it fills per-blob target
// positions for time t.
BlobRunSeries advect_with_diagnostics(ParticleField& field, const RunConfig& config,
                                      AlphaParam alpha, const ExternalField& particle_field_ext,
                                      DiagnosticsTracker& tracker, std::ostream& diag_csv,
                                      const std::function<void(double, std::vector<Vec2>&)>* targets_at,
                                      RunReport& report) {
    const int blobs = field.blob_count();
    BlobRunSeries series;
    series.max_err.resize(blobs);
    series.records.resize(blobs);

    std::vector<Vec2> targets(blobs);
    auto record_now = [&]() {
        const std::vector<Vec2>* tptr = nullptr;
        if (targets_at) {
            (*targets_at)(field.time, targets);
            tptr = &targets;
        }
        const auto records = tracker.record(field, config.probe_radii, tptr);
        write_diagnostics_rows(diag_csv, records);
        series.times.push_back(field.time);
        for (int b = 0; b < blobs; ++b) {
            series.max_err[b].push_back(records[b].max_tracking_error);
            series.records[b].push_back(records[b]);
        }
    };

    write_diagnostics_header(diag_csv, config.probe_radii);
    record_now();

    const long nsteps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-12));
    for (long step = 0; step < nsteps; ++step) {
        double h = config.dt;
        const double remaining = config.t_end - field.time;
        if (remaining < config.dt) h = remaining;
        field = advect_step(field, alpha, particle_field_ext, h);
        tracker.advance(h);
        if (step + 1 == nsteps) field.time = config.t_end;  // keep grids exact
        ++report.total_steps;
        if ((step + 1) % config.diag_stride == 0 || step + 1 == nsteps) {
            record_now();
        }
    }
    return series;
}

void weight_sum_checks(RunReport& report, const ParticleField& initial, const ParticleField& final_field) {
    // Lagrangian weights are never touched: the per-blob sums must be
    // bitwise identical across the whole run.
    bool exact = initial.particle_count() == final_field.particle_count();
    if (exact) {
        for (std::size_t k = 0; k < initial.particle_count(); ++k) {
            if (initial.weights[k] != final_field.weights[k]) {
                exact = false;
                break;
            }
        }
    }
    add_check(report, "weights_bitwise_conserved", exact, exact ? 0.0 : 1.0, 0.0);
}

void run_single_blob(const RunConfig& config, RunReport& report, OutputDir& out) {
    const AlphaParam alpha(config.alpha);
    const double eps = config.epsilons.front();
    const bool driven = config.scenario == Scenario::single_blob_driven;

    BlobSpec spec;
    spec.center = config.blobs[0].center;
    spec.radius = eps;
    spec.intensity = config.blobs[0].intensity;
    spec.profile = config.blobs[0].profile;
    spec.max_density = config.max_density;

    ParticleField field = init_blobs({spec}, config.particles_per_diameter, config.smoothing_factor);
    const ParticleField initial = field;
    const ExternalField external = driven ? config.external.build() : ExternalField{ZeroField{}};

    DiagnosticsTracker tracker({spec.center}, {external});
    auto diag_csv = out.open("diagnostics.csv");

    // the tracked target of a lone blob is its reduced center
    std::function<void(double, std::vector<Vec2>&)> targets_at =
        [&tracker](double, std::vector<Vec2>& t) { t[0] = tracker.reduced_centers()[0]; };
    BlobRunSeries series =
        advect_with_diagnostics(field, config, alpha, external, tracker, diag_csv, &targets_at, report);

    {
        auto os = out.open("particles_final.csv");
        write_snapshot_csv(os, field);
    }
    if (config.binary_snapshot) {
        auto os = out.open("particles_final.bin", true);
        write_snapshot_binary(os, field, config.alpha);
    }

    weight_sum_checks(report, initial, field);

    const auto& recs = series.records[0];
    if (!driven) {
        double center_drift = 0.0, inertia_drift = 0.0;
        for (const BlobDiagnostics& d : recs) {
            center_drift = std::max(center_drift, (d.center - recs.front().center).norm());
            inertia_drift = std::max(inertia_drift,
                                     std::abs(d.inertia - recs.front().inertia) / recs.front().inertia);
        }
        add_check(report, "center_conservation", center_drift <= 1e-3 * eps, center_drift, 1e-3 * eps);
        add_check(report, "inertia_relative_drift", inertia_drift <= 1e-2, inertia_drift, 1e-2);
    } else {
        const double lip = lipschitz_bound(external, 0.0);
        const EnvelopeCheck env = lemma_envelope_check(recs, eps, lip, 1.1);
        add_check(report, "inertia_envelope", env.inertia_ok, env.worst_inertia_fraction, 1.0);
        add_check(report, "center_envelope", env.center_ok, env.worst_center_fraction, 1.0);

        const FieldSpotCheck fc =
            field_spot_check(external, 0.0, spec.center, std::max(1.0, 4.0 * eps), config.seed);
        add_check(report, "field_lipschitz_spot_check", fc.worst_lipschitz_ratio <= 1.0 + 1e-9,
                  fc.worst_lipschitz_ratio, 1.0 + 1e-9);
        const double div_bound = 1e-6 * std::max(fc.field_scale, 1e-300) / 1e-4;
        add_check(report, "field_divergence_spot_check", fc.worst_divergence <= div_bound,
                  fc.worst_divergence, div_bound);
    }

    const LocalizationSpec loc{eps, config.beta, TrackingTarget::reduced_center};
    const auto exit = first_exit(series.times, series.max_err[0], loc.threshold(), field.smoothing);
    EpsilonOutcome outcome;
    outcome.epsilon = eps;
    outcome.censored = !exit.has_value();
    outcome.measured_time = exit.value_or(config.t_end);
    outcome.per_blob_exit = {outcome.measured_time};
    outcome.per_blob_censored = {outcome.censored};
    outcome.final_max_tracking_error = series.max_err[0].back();
    report.epsilon_outcomes.push_back(outcome);
}

void run_n_blob(const RunConfig& config, RunReport& report, OutputDir& out) {
    const AlphaParam alpha(config.alpha);

    PseudoVortexState pv;
    for (const ConfigBlob& b : config.blobs) {
        pv.positions.push_back(b.center);
        pv.intensities.push_back(b.intensity);
    }

    std::shared_ptr<const PvTrajectory> traj;
    if (pv.size() > 1) {
        const EventThresholds thr = thresholds_for(config, pv);
        IntegrationResult r = pv_integrate(pv, alpha, config.dt, config.t_end, thr);
        report.total_steps += static_cast<long>(r.trajectory.samples()) - 1;
        {
            auto os = out.open("trajectory.csv");
            write_trajectory_csv(os, r.trajectory, alpha, trajectory_stride(r.trajectory));
        }
        if (r.event.kind != EventKind::none) {
            report.aborted = true;
            report.abort_reason = "target point system: " + event_text(r.event);
            return;
        }
        traj = std::make_shared<const PvTrajectory>(std::move(r.trajectory));
    } else {
        // a single blob tracks a stationary point
        PvTrajectory t;
        t.intensities = pv.intensities;
        t.times = {0.0, config.t_end};
        t.positions = {pv.positions, pv.positions};
        traj = std::make_shared<const PvTrajectory>(std::move(t));
    }

    auto loc_csv = out.open("localization.csv");
    loc_csv << "epsilon,blob_id,exit_time,censored\n";

    std::vector<double> abscissae, horizons;
    std::vector<double> final_errs;
    for (const double eps : config.epsilons) {
        std::vector<BlobSpec> specs;
        std::vector<ExternalField> fields;
        std::vector<Vec2> centers;
        const LocalizationSpec loc{eps, config.beta, TrackingTarget::pseudo_vortex};
        for (std::size_t b = 0; b < config.blobs.size(); ++b) {
            BlobSpec spec;
            spec.center = config.blobs[b].center;
            spec.radius = eps;
            spec.intensity = config.blobs[b].intensity;
            spec.profile = config.blobs[b].profile;
            spec.max_density = config.max_density;
            specs.push_back(spec);
            centers.push_back(spec.center);
            fields.push_back(OtherVortices{traj, config.alpha, b, loc.threshold()});
        }

        ParticleField field = init_blobs(specs, config.particles_per_diameter, config.smoothing_factor);
        const ParticleField initial = field;
        DiagnosticsTracker tracker(centers, fields);
        auto diag_csv = out.open("diagnostics_eps" + csv::num(eps) + ".csv");

        std::function<void(double, std::vector<Vec2>&)> targets_at =
            [&traj](double t, std::vector<Vec2>& targets) {
                const auto z = traj->positions_at(t);
                for (std::size_t b = 0; b < targets.size(); ++b) targets[b] = z[b];
            };
        const ExternalField none = ZeroField{};
        BlobRunSeries series =
            advect_with_diagnostics(field, config, alpha, none, tracker, diag_csv, &targets_at, report);

        weight_sum_checks(report, initial, field);
        if (config.binary_snapshot) {
            auto os = out.open("particles_final_eps" + csv::num(eps) + ".bin", true);
            write_snapshot_binary(os, field, config.alpha);
        }

        EpsilonOutcome outcome;
        outcome.epsilon = eps;
        double overall = config.t_end;
        bool all_censored = true;
        double final_err = 0.0;
        for (int b = 0; b < field.blob_count(); ++b) {
            const auto exit =
                first_exit(series.times, series.max_err[b], loc.threshold(), field.smoothing);
            outcome.per_blob_exit.push_back(exit.value_or(config.t_end));
            outcome.per_blob_censored.push_back(!exit.has_value());
            if (exit) {
                all_censored = false;
                overall = std::min(overall, *exit);
            }
            outcome.per_blob_final_error.push_back(series.max_err[b].back());
            final_err = std::max(final_err, series.max_err[b].back());
            loc_csv << csv::num(eps) << ',' << b << ',' << csv::num(outcome.per_blob_exit.back())
                    << ',' << (exit ? "false" : "true") << '\n';
        }
        outcome.measured_time = overall;
        outcome.censored = all_censored;
        outcome.final_max_tracking_error = final_err;
        report.epsilon_outcomes.push_back(outcome);

        abscissae.push_back(std::abs(std::log(eps)));
        horizons.push_back(overall);
        final_errs.push_back(final_err);
    }

    if (abscissae.size() >= 2) {
        const auto [c0, c1] = least_squares_line(abscissae, horizons);
        report.fit_intercept = c0;
        report.fit_slope = c1;
        report.fit_valid = true;
    }
    // flag: tracking error should shrink as epsilon does (epsilons as listed,
    // checked over the decreasing-ordered list)
    {
        std::vector<std::pair<double, double>> by_eps;
        for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
            by_eps.emplace_back(config.epsilons[i], final_errs[i]);
        }
        std::sort(by_eps.begin(), by_eps.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 1; i < by_eps.size(); ++i) {
            if (by_eps[i].second > by_eps[i - 1].second) report.tracking_monotone = false;
        }
    }

    // spot-check the coupling field of blob 0 on its protected disk at t = 0
    if (config.blobs.size() > 1) {
        const double eps0 = config.epsilons.front();
        const LocalizationSpec loc{eps0, config.beta, TrackingTarget::pseudo_vortex};
        const ExternalField f0 = OtherVortices{traj, config.alpha, 0, loc.threshold()};
        const FieldSpotCheck fc =
            field_spot_check(f0, 0.0, config.blobs[0].center, loc.threshold(), config.seed);
        add_check(report, "coupling_lipschitz_spot_check", fc.worst_lipschitz_ratio <= 1.0 + 1e-9,
                  fc.worst_lipschitz_ratio, 1.0 + 1e-9);
        const double div_bound = 1e-6 * std::max(fc.field_scale, 1e-300) / 1e-4;
        add_check(report, "coupling_divergence_spot_check", fc.worst_divergence <= div_bound,
                  fc.worst_divergence, div_bound);
    }
}

void run_expanding_triple(const RunConfig& config, RunReport& report, OutputDir& out) {
    const AlphaParam alpha(config.alpha);
    PseudoVortexState state;
    if (config.vortices.size() == 3) {
        for (const ConfigVortex& v : config.vortices) {
            state.positions.push_back(v.position);
            state.intensities.push_back(v.intensity);
        }
        report.search_residual = self_similarity_residual(state, alpha, config.search);
    } else {
        const TripleSearchResult found = search_self_similar_triple(alpha, config.search);
        state = found.state;
        report.search_residual = found.residual;
    }

    // forward integration until the mean pair growth reaches growth_factor
    const auto l0 = std::array<double, 3>{distance(state.positions[0], state.positions[1]),
                                          distance(state.positions[0], state.positions[2]),
                                          distance(state.positions[1], state.positions[2])};
    const double lmin = std::min({l0[0], l0[1], l0[2]});
    double amax = 0.0;
    for (double a : state.intensities) amax = std::max(amax, std::abs(a));
    const double coef = phi_alpha(alpha).alpha_phi;
    const double tau = std::pow(lmin, config.alpha + 2.0) / (coef * amax);
    const double dt = std::min(config.dt, 1e-3 * tau);

    EventThresholds thr = thresholds_for(config, state);
    PvTrajectory forward;
    forward.intensities = state.intensities;
    PseudoVortexState cur = state;
    double growth = 1.0;
    long forward_steps = 0;
    const long max_steps = 2000000;
    while (growth < config.growth_factor && forward_steps < max_steps) {
        IntegrationResult r = pv_integrate(cur, alpha, dt, cur.time + 200.0 * dt, thr);
        forward_steps += static_cast<long>(r.trajectory.samples()) - 1;
        for (std::size_t s = (forward.samples() == 0 ? 0 : 1); s < r.trajectory.samples(); ++s) {
            forward.times.push_back(r.trajectory.times[s]);
            forward.positions.push_back(r.trajectory.positions[s]);
        }
        cur = r.final_state;
        if (r.event.kind != EventKind::none) {
            report.aborted = true;
            report.abort_reason = event_text(r.event);
            break;
        }
        const auto l = std::array<double, 3>{distance(cur.positions[0], cur.positions[1]),
                                             distance(cur.positions[0], cur.positions[2]),
                                             distance(cur.positions[1], cur.positions[2])};
        growth = (l[0] / l0[0] + l[1] / l0[1] + l[2] / l0[2]) / 3.0;
    }
    report.total_steps += forward_steps;
    {
        auto os = out.open("trajectory.csv");
        write_trajectory_csv(os, forward, alpha, trajectory_stride(forward));
    }
    if (report.aborted) return;

    // fit on a decimated copy; the fit does not need every step
    PvTrajectory fit_traj;
    fit_traj.intensities = forward.intensities;
    const std::size_t fit_stride = std::max<std::size_t>(1, forward.samples() / 4000);
    for (std::size_t s = 0; s < forward.samples(); s += fit_stride) {
        fit_traj.times.push_back(forward.times[s]);
        fit_traj.positions.push_back(forward.positions[s]);
    }
    const SelfSimilarFit fit = detect_self_similar_expansion(fit_traj);
    report.fitted_exponent = fit.exponent;
    report.fitted_growth = fit.growth_rate;
    const double expected = 1.0 / (2.0 + config.alpha);
    add_check(report, "expansion_exponent",
              std::abs(fit.exponent - expected) / expected <= 0.05,
              std::abs(fit.exponent - expected) / expected, 0.05);
    add_check(report, "expansion_self_similar", fit.is_self_similar, fit.ratio_spread, 0.01);

    // backward probe toward the predicted collapse at t = -1/g
    const double floor = 1e-2 * lmin;
    const CollapseProbe probe = backward_collapse_probe(state, alpha, fit.growth_rate, floor);
    report.collapse_detected = probe.collapsed;
    report.collapse_event_time = probe.event_time;
    {
        auto os = out.open("collapse_probe.csv");
        os << "t,min_distance\n";
        for (std::size_t k = 0; k < probe.sample_times.size(); ++k) {
            os << csv::num(probe.sample_times[k]) << ',' << csv::num(probe.sample_min_distance[k])
               << '\n';
        }
    }
    add_check(report, "collapse_detected", probe.collapsed, probe.collapsed ? 1.0 : 0.0, 1.0);
    const double deadline = -(1.0 - 1e-2) / fit.growth_rate;
    add_check(report, "collapse_time_beyond_99pct", probe.collapsed && probe.event_time <= deadline,
              probe.event_time, deadline);
}

void write_report_file(const RunReport& report, OutputDir& out) {
    auto os = out.open("report.txt");
    os << "status: " << (report.aborted ? "aborted" : "completed") << '\n';
    if (report.aborted) {
        os << "abort_reason: " << report.abort_reason << '\n';
    }
    os << "scenario: " << scenario_name(report.config.scenario) << '\n';
    if (!report.regime_label.empty()) {
        os << "regime: " << report.regime_label << '\n';
    }
    os << "wall_seconds: " << csv::num(report.wall_seconds) << '\n';
    os << "total_steps: " << report.total_steps << '\n';

    if (!report.epsilon_outcomes.empty()) {
        os << "\n[localization]\n";
        for (const EpsilonOutcome& o : report.epsilon_outcomes) {
            os << "epsilon " << csv::num(o.epsilon) << ": T = " << csv::num(o.measured_time)
               << (o.censored ? " (censored)" : "")
               << ", final max tracking error = " << csv::num(o.final_max_tracking_error) << '\n';
        }
        if (report.fit_valid) {
            os << "fit T(eps) = c0 + c1 |log eps|: c0 = " << csv::num(report.fit_intercept)
               << ", c1 = " << csv::num(report.fit_slope) << '\n';
            std::vector<EpsilonOutcome> sorted = report.epsilon_outcomes;
            std::sort(sorted.begin(), sorted.end(),
                      [](const EpsilonOutcome& a, const EpsilonOutcome& b) {
                          return a.epsilon > b.epsilon;
                      });
            bool monotone = true;
            for (std::size_t i = 1; i < sorted.size(); ++i) {
                if (sorted[i].measured_time < sorted[i - 1].measured_time) monotone = false;
            }
            os << "T non-decreasing as epsilon decreases: " << (monotone ? "yes" : "flagged")
               << '\n';
        }
        os << "tracking error monotone in epsilon: " << (report.tracking_monotone ? "yes" : "flagged")
           << '\n';
    }

    if (report.predicted_period != 0.0) {
        os << "\n[two_vortex]\n";
        os << "predicted_period: " << csv::num(report.predicted_period) << '\n';
        os << "measured_period: " << csv::num(report.measured_period) << '\n';
    }
    if (report.separation_drift != 0.0) {
        os << "separation_drift: " << csv::num(report.separation_drift) << '\n';
    }
    if (report.fitted_growth != 0.0) {
        os << "\n[expanding_triple]\n";
        os << "search_residual: " << csv::num(report.search_residual) << '\n';
        os << "fitted_growth: " << csv::num(report.fitted_growth) << '\n';
        os << "fitted_exponent: " << csv::num(report.fitted_exponent) << '\n';
        os << "collapse_detected: " << (report.collapse_detected ? "yes" : "no") << '\n';
        os << "collapse_event_time: " << csv::num(report.collapse_event_time) << '\n';
    }

    os << "\n[invariants]\n";
    for (const InvariantCheck& c : report.invariants) {
        os << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (value " << csv::num(c.value)
           << ", bound " << csv::num(c.bound) << ")\n";
    }

    os << "\n[manifest]\n";
    for (const std::string& f : report.manifest) {
        os << f << '\n';
    }
}

} // namespace

RunReport run_scenario(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.config = config;

    if (config.scenario == Scenario::single_blob_free ||
        config.scenario == Scenario::single_blob_driven ||
        config.scenario == Scenario::n_blob_localization) {
        const double bound = beta_bound(AlphaParam(config.alpha));
        report.regime_label = config.beta < bound
                                  ? "admissible (beta " + csv::num(config.beta) + " < bound " +
                                        csv::num(bound) + ")"
                                  : "out-of-regime (beta " + csv::num(config.beta) +
                                        " >= bound " + csv::num(bound) + ")";
    }

    OutputDir out(config.output_dir, report);
    {
        auto echo = out.open("config_echo.cfg");
        echo << serialize_config(config);
    }

    try {
        switch (config.scenario) {
            case Scenario::two_vortex_calibration:
                run_two_vortex(config, report, out);
                break;
            case Scenario::single_blob_free:
            case Scenario::single_blob_driven:
                run_single_blob(config, report, out);
                break;
            case Scenario::n_blob_localization:
                run_n_blob(config, report, out);
                break;
            case Scenario::expanding_triple:
                run_expanding_triple(config, report, out);
                break;
        }
    } catch (const SearchFailureError& e) {
        report.aborted = true;
        report.search_residual = e.best_residual;
        report.abort_reason = std::string("search failure: ") + e.what();
    } catch (const SingularityError& e) {
        report.aborted = true;
        report.abort_reason = std::string("singularity: ") + e.what();
    } catch (const StepRejectedError& e) {
        report.aborted = true;
        report.abort_reason = std::string("step rejected: ") + e.what();
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report_file(report, out);
    out.verify_manifest();
    return report;
}

} // namespace msqg
