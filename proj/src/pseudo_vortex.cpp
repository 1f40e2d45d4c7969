#include "msqg/pseudo_vortex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "msqg/csv.hpp"
#include "msqg/errors.hpp"

namespace msqg {

void PseudoVortexState::validate() const {
    if (positions.empty()) {
        throw std::invalid_argument("PseudoVortexState: empty state");
    }
    if (positions.size() != intensities.size()) {
        throw std::invalid_argument("PseudoVortexState: positions/intensities size mismatch");
    }
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        if (intensities[i] == 0.0) {
            throw std::invalid_argument("PseudoVortexState: intensity " + std::to_string(i) + " is zero");
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (positions[i] == positions[j]) {
                throw SingularityError("PseudoVortexState: coincident vortices", i, j);
            }
        }
    }
}

double PseudoVortexState::min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            best = std::min(best, distance(positions[i], positions[j]));
        }
    }
    return best;
}

double PseudoVortexState::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            best = std::max(best, distance(positions[i], positions[j]));
        }
    }
    return best;
}

EventThresholds EventThresholds::defaults_for(const PseudoVortexState& state) {
    const double dmin = state.size() > 1 ? state.min_pairwise_distance() : 0.0;
    double scale = state.diameter();
    for (const Vec2& z : state.positions) scale = std::max(scale, z.norm());
    if (scale == 0.0) scale = 1.0;
    return {1e-4 * dmin, 1e4 * scale};
}

namespace {

std::vector<Vec2> rhs_at(const std::vector<Vec2>& z, const std::vector<double>& a, double coef,
                         double alpha) {
    const std::size_t n = z.size();
    const double expo = -(alpha + 2.0) / 2.0;
    std::vector<Vec2> v(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec2 d = z[i] - z[j];
            const double q = d.norm_sq();
            if (q == 0.0) {
                throw SingularityError("pv_rhs: coincident vortices", std::min(i, j), std::max(i, j));
            }
            acc += (a[j] * std::pow(q, expo)) * d.perp();
        }
        v[i] = coef * acc;
    }
    return v;
}

double min_pair_distance(const std::vector<Vec2>& z, std::size_t* pi, std::size_t* pj) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            const double d = distance(z[i], z[j]);
            if (d < best) {
                best = d;
                if (pi) *pi = i;
                if (pj) *pj = j;
            }
        }
    }
    return best;
}

} // namespace

std::vector<Vec2> pv_rhs(const PseudoVortexState& state, AlphaParam alpha) {
    if (state.positions.size() != state.intensities.size() || state.positions.empty()) {
        throw std::invalid_argument("pv_rhs: malformed state");
    }
    const double coef = phi_alpha(alpha).alpha_phi;
    return rhs_at(state.positions, state.intensities, coef, alpha.value());
}

ConservedQuantities hamiltonian(const PseudoVortexState& state, AlphaParam alpha) {
    if (state.positions.size() != state.intensities.size() || state.positions.empty()) {
        throw std::invalid_argument("hamiltonian: malformed state");
    }
    ConservedQuantities q{0.0, {0.0, 0.0}, 0.0};
    for (std::size_t i = 0; i < state.size(); ++i) {
        q.linear_impulse += state.intensities[i] * state.positions[i];
        q.angular_impulse += state.intensities[i] * state.positions[i].norm_sq();
        for (std::size_t j = i + 1; j < state.size(); ++j) {
            const double r = distance(state.positions[i], state.positions[j]);
            if (r == 0.0) {
                throw SingularityError("hamiltonian: coincident vortices", i, j);
            }
            q.hamiltonian += state.intensities[i] * state.intensities[j] * green(alpha, r);
        }
    }
    return q;
}

IntegrationResult pv_integrate(const PseudoVortexState& state, AlphaParam alpha, double dt,
                               double t_end, const EventThresholds& thresholds) {
    state.validate();
    if (dt == 0.0) throw std::invalid_argument("pv_integrate: dt must be nonzero");
    const double span = t_end - state.time;
    if (span * dt <= 0.0) {
        throw std::invalid_argument("pv_integrate: t_end must lie in the direction of dt");
    }
    if (!(thresholds.collapse >= 0.0) || !(thresholds.escape > 0.0)) {
        throw std::invalid_argument("pv_integrate: thresholds must be positive");
    }

    const double coef = phi_alpha(alpha).alpha_phi;
    const double a = alpha.value();
    const double stage_floor = 1e-3 * thresholds.collapse;

    IntegrationResult result;
    result.trajectory.intensities = state.intensities;
    result.trajectory.times.push_back(state.time);
    result.trajectory.positions.push_back(state.positions);

    std::vector<Vec2> z = state.positions;
    double t = state.time;

    auto check_events = [&](double now) -> bool {
        std::size_t i = 0, j = 0;
        if (z.size() > 1) {
            const double dmin = min_pair_distance(z, &i, &j);
            if (dmin < thresholds.collapse) {
                result.event = {EventKind::collapse, now, i, j, thresholds.collapse};
                return true;
            }
        }
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (z[k].norm() > thresholds.escape) {
                result.event = {EventKind::escape, now, k, 0, thresholds.escape};
                return true;
            }
        }
        return false;
    };

    auto guarded_rhs = [&](const std::vector<Vec2>& pos, double now) {
        if (pos.size() > 1 && min_pair_distance(pos, nullptr, nullptr) < stage_floor) {
            throw StepRejectedError("pv_integrate: stage below 1e-3 x collapse threshold; dt too "
                                    "large near close approach",
                                    now);
        }
        return rhs_at(pos, state.intensities, coef, a);
    };

    if (check_events(t)) {
        result.final_state = {z, state.intensities, t};
        return result;
    }

    const std::size_t n = z.size();
    const long nsteps = static_cast<long>(std::ceil(std::abs(span / dt) - 1e-12));
    std::vector<Vec2> stage(n), k1, k2, k3, k4;
    for (long step = 0; step < nsteps; ++step) {
        double h = dt;
        const double remaining = t_end - t;
        if (std::abs(remaining) < std::abs(dt)) h = remaining;

        k1 = guarded_rhs(z, t);
        for (std::size_t i = 0; i < n; ++i) stage[i] = z[i] + (0.5 * h) * k1[i];
        k2 = guarded_rhs(stage, t);
        for (std::size_t i = 0; i < n; ++i) stage[i] = z[i] + (0.5 * h) * k2[i];
        k3 = guarded_rhs(stage, t);
        for (std::size_t i = 0; i < n; ++i) stage[i] = z[i] + h * k3[i];
        k4 = guarded_rhs(stage, t);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = (step + 1 == nsteps) ? t_end : state.time + static_cast<double>(step + 1) * dt;

        result.trajectory.times.push_back(t);
        result.trajectory.positions.push_back(z);
        if (check_events(t)) break;
    }

    result.final_state = {z, state.intensities, t};
    return result;
}

PseudoVortexState PvTrajectory::state_at(std::size_t sample) const {
    return {positions.at(sample), intensities, times.at(sample)};
}

double PvTrajectory::min_pair_distance_at(std::size_t sample) const {
    return min_pair_distance(positions.at(sample), nullptr, nullptr);
}

std::vector<Vec2> PvTrajectory::positions_at(double t) const {
    if (times.empty()) throw ExtrapolationError("PvTrajectory: empty trajectory");
    const double t0 = times.front();
    const double t1 = times.back();
    const double lo = std::min(t0, t1);
    const double hi = std::max(t0, t1);
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack) {
        throw ExtrapolationError("PvTrajectory: time " + std::to_string(t) +
                                 " outside sampled span [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    }
    const double tc = std::clamp(t, lo, hi);

    // times are monotone (increasing forward, decreasing backward)
    const bool increasing = t1 >= t0;
    std::size_t k;
    if (increasing) {
        k = static_cast<std::size_t>(
            std::upper_bound(times.begin(), times.end(), tc) - times.begin());
    } else {
        k = static_cast<std::size_t>(
            std::upper_bound(times.begin(), times.end(), tc, std::greater<double>()) - times.begin());
    }
    if (k == 0) k = 1;
    if (k >= times.size()) k = times.size() - 1;
    const double ta = times[k - 1];
    const double tb = times[k];
    const double w = (tb == ta) ? 0.0 : (tc - ta) / (tb - ta);
    std::vector<Vec2> out(count());
    for (std::size_t i = 0; i < count(); ++i) {
        out[i] = positions[k - 1][i] + w * (positions[k][i] - positions[k - 1][i]);
    }
    return out;
}

std::vector<ConservedQuantities> conserved_series(const PvTrajectory& trajectory, AlphaParam alpha) {
    std::vector<ConservedQuantities> out;
    out.reserve(trajectory.samples());
    for (std::size_t s = 0; s < trajectory.samples(); ++s) {
        out.push_back(hamiltonian(trajectory.state_at(s), alpha));
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const PvTrajectory& traj, AlphaParam alpha,
                          std::size_t stride) {
    if (stride == 0) stride = 1;
    os << "t";
    for (std::size_t i = 0; i < traj.count(); ++i) {
        os << ",z" << (i + 1) << "_x,z" << (i + 1) << "_y";
    }
    os << ",H,impulse_x,impulse_y,angular_impulse\n";
    auto emit = [&](std::size_t s) {
        const ConservedQuantities q = hamiltonian(traj.state_at(s), alpha);
        os << csv::num(traj.times[s]);
        for (std::size_t i = 0; i < traj.count(); ++i) {
            os << ',' << csv::num(traj.positions[s][i].x) << ','
               << csv::num(traj.positions[s][i].y);
        }
        os << ',' << csv::num(q.hamiltonian) << ',' << csv::num(q.linear_impulse.x) << ','
           << csv::num(q.linear_impulse.y) << ',' << csv::num(q.angular_impulse) << '\n';
    };
    std::size_t last_emitted = 0;
    for (std::size_t s = 0; s < traj.samples(); s += stride) {
        emit(s);
        last_emitted = s;
    }
    if (last_emitted + 1 != traj.samples() && traj.samples() > 0) {
        emit(traj.samples() - 1);
    }
}

} // namespace msqg
