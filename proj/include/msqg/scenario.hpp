#ifndef MSQG_SCENARIO_HPP
#define MSQG_SCENARIO_HPP

#include <string>
#include <vector>

#include "msqg/config.hpp"

namespace msqg {

struct InvariantCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct EpsilonOutcome {
    double epsilon = 0.0;
    double measured_time = 0.0;  // overall localization horizon (t_end when censored)
    bool censored = false;
    std::vector<double> per_blob_exit;
    std::vector<bool> per_blob_censored;
    std::vector<double> per_blob_final_error;  // tracking error at the final sample
    double final_max_tracking_error = 0.0;     // worst blob at the final sample
};

struct RunReport {
    RunConfig config;
    bool aborted = false;
    std::string abort_reason;
    std::string regime_label;  // localization runs: admissible vs out-of-regime beta

    std::vector<EpsilonOutcome> epsilon_outcomes;
    bool fit_valid = false;
    double fit_intercept = 0.0;  // T(eps) ~ c0 + c1 |log eps|
    double fit_slope = 0.0;
    bool tracking_monotone = true;  // final tracking error non-increasing as eps decreases

    std::vector<InvariantCheck> invariants;
    std::vector<std::string> manifest;  // files written, relative to output_dir

    double wall_seconds = 0.0;
    long total_steps = 0;

    // two_vortex_calibration
    double measured_period = 0.0;
    double predicted_period = 0.0;
    double separation_drift = 0.0;

    // expanding_triple
    double fitted_exponent = 0.0;
    double fitted_growth = 0.0;
    double search_residual = 0.0;
    bool collapse_detected = false;
    double collapse_event_time = 0.0;

    bool all_invariants_pass() const;
};

/// Executes a validated configuration end to end and writes every output
/// (config echo, CSVs, report) into config.output_dir. Mid-run collapse,
/// escape or search failure aborts the run: partial outputs are kept and the
/// report carries the reason. Throws IoError when files cannot be written.
RunReport run_scenario(const RunConfig& config);

/// Least-squares line y = c0 + c1 x; returns {c0, c1}.
std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y);

} // namespace msqg

#endif
