#include "msqg/self_similar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "msqg/errors.hpp"

namespace msqg {

namespace {

constexpr std::array<std::array<std::size_t, 2>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};

std::array<double, 3> pair_distances(const std::vector<Vec2>& z) {
    return {distance(z[0], z[1]), distance(z[0], z[2]), distance(z[1], z[2])};
}

// rms of the joint fit y_pt = p * log(1 + g t) and the optimal p for this g.
struct FitEval {
    double rms;
    double p;
};

FitEval eval_fit(double g, const std::vector<double>& t, const std::array<std::vector<double>, 3>& y) {
    double su2 = 0.0, suy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double arg = 1.0 + g * t[k];
        if (arg <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
        const double u = std::log(arg);
        for (int pair = 0; pair < 3; ++pair) {
            su2 += u * u;
            suy += u * y[pair][k];
        }
    }
    const double p = su2 > 0.0 ? suy / su2 : 0.0;
    double ss = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double u = std::log(1.0 + g * t[k]);
        for (int pair = 0; pair < 3; ++pair) {
            const double r = y[pair][k] - p * u;
            ss += r * r;
        }
    }
    return {std::sqrt(ss / static_cast<double>(3 * t.size())), p};
}

// golden-section minimization of f on [lo, hi]
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

SelfSimilarFit detect_self_similar_expansion(const PvTrajectory& trajectory, double ratio_tol,
                                             double residual_tol) {
    if (trajectory.count() != 3) {
        throw std::domain_error("detect_self_similar_expansion: exactly 3 vortices required");
    }
    if (trajectory.samples() < 10) {
        throw std::domain_error("detect_self_similar_expansion: at least 10 samples required");
    }

    const std::size_t ns = trajectory.samples();
    const auto l0 = pair_distances(trajectory.positions.front());
    std::vector<double> t(ns);
    std::array<std::vector<double>, 3> y;
    for (auto& v : y) v.resize(ns);

    double spread = 0.0;
    double max_dev = 0.0;
    for (std::size_t k = 0; k < ns; ++k) {
        t[k] = trajectory.times[k] - trajectory.times.front();
        const auto l = pair_distances(trajectory.positions[k]);
        double mean_ratio = 0.0;
        for (int pair = 0; pair < 3; ++pair) {
            const double ratio = l[pair] / l0[pair];
            y[pair][k] = std::log(ratio);
            mean_ratio += ratio / 3.0;
            max_dev = std::max(max_dev, std::abs(ratio - 1.0));
        }
        for (int pair = 0; pair < 3; ++pair) {
            spread = std::max(spread, std::abs(l[pair] / l0[pair] - mean_ratio) / mean_ratio);
        }
    }

    SelfSimilarFit fit;
    fit.ratio_spread = spread;
    if (max_dev < 1e-9) {
        // distances constant: nothing to fit
        return fit;
    }

    const double horizon = std::abs(t.back()) > 0.0 ? std::abs(t.back()) : 1.0;
    auto objective = [&](double logg) { return eval_fit(std::exp(logg), t, y).rms; };

    // coarse bracket in log g over many decades, then golden refinement
    double best_logg = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const double lo = std::log(1e-8 / horizon);
    const double hi = std::log(1e8 / horizon);
    const int coarse = 400;
    for (int i = 0; i <= coarse; ++i) {
        const double lg = lo + (hi - lo) * static_cast<double>(i) / coarse;
        const double v = objective(lg);
        if (v < best) {
            best = v;
            best_logg = lg;
        }
    }
    const double width = (hi - lo) / coarse;
    best_logg = golden_min(objective, best_logg - width, best_logg + width, 200);

    const double g = std::exp(best_logg);
    const FitEval fe = eval_fit(g, t, y);
    fit.growth_rate = g;
    fit.exponent = fe.p;
    fit.fit_residual = fe.rms;
    fit.is_self_similar = (spread <= ratio_tol) && (fe.rms <= residual_tol);
    return fit;
}

namespace {

// Triangle with vertices z1 = (0,0), z2 = (1,0) and z3 above the axis, from
// side ratios r1 = |z1-z3|, r2 = |z2-z3|. Returns false when degenerate.
bool place_triangle(double r1, double r2, std::vector<Vec2>& out) {
    const double x3 = 0.5 * (1.0 + r1 * r1 - r2 * r2);
    const double y3sq = r1 * r1 - x3 * x3;
    if (y3sq < 1e-4) return false;
    out = {{0.0, 0.0}, {1.0, 0.0}, {x3, std::sqrt(y3sq)}};
    return true;
}

// Intensities (1, a2, a3) and rate g matching the three instantaneous
// distance-growth equations d(l_ij^2)/dt = 2g l_ij^2 / (2+alpha), using
//   d(l_ij^2)/dt = -4 C A a_k (l_ik^{-(a+2)} - l_jk^{-(a+2)}),
// with C = alpha*phi(alpha) and A the signed triangle area. Mirrors the
// triangle when the matched rate comes out contracting.
struct SeedResult {
    bool ok = false;
    std::vector<Vec2> positions;
    double a2 = 0.0, a3 = 0.0;
    double g = 0.0;
};

SeedResult seed_from_shape(double r1, double r2, double alpha, double coef) {
    SeedResult seed;
    std::vector<Vec2> z;
    if (!place_triangle(r1, r2, z)) return seed;

    const double l12 = 1.0, l13 = r1, l23 = r2;
    const double area = 0.5 * z[2].y; // signed area of (z1, z2, z3), positive here
    const double p = alpha + 2.0;
    const double c12 = std::pow(l12, -p), c13 = std::pow(l13, -p), c23 = std::pow(l23, -p);

    const double denom_g = c12 - c13;
    const double denom2 = c23 - c12;
    const double denom3 = c13 - c23;
    if (std::abs(denom_g) < 1e-12 || std::abs(denom2) < 1e-12 || std::abs(denom3) < 1e-12) {
        return seed; // isoceles: some growth equation degenerates
    }

    double g = -0.5 * (2.0 + alpha) * 4.0 * coef * area * denom_g / (l23 * l23);
    const double a2 = -2.0 * g * l13 * l13 / ((2.0 + alpha) * 4.0 * coef * area * denom2);
    const double a3 = -2.0 * g * l12 * l12 / ((2.0 + alpha) * 4.0 * coef * area * denom3);
    if (g == 0.0 || a2 == 0.0 || a3 == 0.0) return seed;
    if (g < 0.0) {
        // reflected configuration runs the same shape dynamics in reverse
        z[2].y = -z[2].y;
        g = -g;
    }
    seed.ok = true;
    seed.positions = z;
    seed.a2 = a2;
    seed.a3 = a3;
    seed.g = g;
    return seed;
}

struct ResidualProbe {
    double residual;
    double growth; // mean pair growth reached at the end of the probe
};

ResidualProbe probe_residual(const PseudoVortexState& state, AlphaParam alpha,
                             double horizon_growth) {
    const auto l0 = pair_distances(state.positions);
    const double lmin = std::min({l0[0], l0[1], l0[2]});
    double amax = 0.0;
    for (double a : state.intensities) amax = std::max(amax, std::abs(a));
    const double coef = phi_alpha(alpha).alpha_phi;
    // fraction of the fastest pair-rotation timescale
    const double tau = std::pow(lmin, alpha.value() + 2.0) / (coef * std::max(amax, 1e-12));
    const double dt = 1e-3 * tau;

    EventThresholds thresholds{1e-6 * lmin, 1e7 * state.diameter()};
    PseudoVortexState current = state;
    double spread = 0.0;
    double growth = 0.0;
    const int max_chunks = 400;
    const double chunk = 50.0 * dt;
    for (int c = 0; c < max_chunks; ++c) {
        IntegrationResult r;
        try {
            r = pv_integrate(current, alpha, dt, current.time + chunk, thresholds);
        } catch (const StepRejectedError&) {
            return {std::numeric_limits<double>::infinity(), growth};
        }
        for (std::size_t s = 0; s < r.trajectory.samples(); ++s) {
            const auto l = pair_distances(r.trajectory.positions[s]);
            double mean = 0.0;
            for (int pair = 0; pair < 3; ++pair) mean += l[pair] / l0[pair] / 3.0;
            for (int pair = 0; pair < 3; ++pair) {
                spread = std::max(spread, std::abs(l[pair] / l0[pair] - mean) / mean);
            }
            growth = mean - 1.0;
        }
        if (r.event.kind != EventKind::none) {
            return {std::numeric_limits<double>::infinity(), growth};
        }
        current = r.final_state;
        if (growth >= horizon_growth - 1.0) break;
        if (growth <= -(1.0 - 1e-3)) break;
    }
    if (std::abs(growth) < 1e-8) {
        return {std::numeric_limits<double>::infinity(), growth};
    }
    return {spread / std::abs(growth), growth};
}

struct Candidate {
    std::array<double, 4> x; // r1, r2, a2, a3
    double value;
};

} // namespace

double self_similarity_residual(const PseudoVortexState& state, AlphaParam alpha,
                                const TripleSearchConfig& config) {
    if (state.size() != 3) {
        throw std::domain_error("self_similarity_residual: exactly 3 vortices required");
    }
    return probe_residual(state, alpha, config.horizon_growth).residual;
}

TripleSearchResult search_self_similar_triple(AlphaParam alpha, const TripleSearchConfig& config) {
    const double coef = phi_alpha(alpha).alpha_phi;

    auto evaluate_mirrored = [&](const std::array<double, 4>& x, bool mirrored) -> double {
        std::vector<Vec2> z;
        if (!place_triangle(x[0], x[1], z)) return 1e12;
        if (mirrored) z[2].y = -z[2].y;
        if (x[2] == 0.0 || x[3] == 0.0) return 1e12;
        if (x[2] < config.intensity_min || x[2] > config.intensity_max ||
            x[3] < config.intensity_min || x[3] > config.intensity_max) {
            return 1e12;
        }
        PseudoVortexState s{z, {1.0, x[2], x[3]}, 0.0};
        return probe_residual(s, alpha, config.horizon_growth).residual;
    };

    // coarse scan over shapes; intensities seeded by the linear rate match
    std::vector<Candidate> seeds;
    std::vector<bool> seed_mirrored;
    for (int i = 0; i < config.grid; ++i) {
        for (int j = 0; j < config.grid; ++j) {
            const double r1 = config.ratio_min +
                              (config.ratio_max - config.ratio_min) * (i + 0.5) / config.grid;
            const double r2 = config.ratio_min +
                              (config.ratio_max - config.ratio_min) * (j + 0.5) / config.grid;
            if (std::abs(r1 - r2) < 0.06 || std::abs(r1 - 1.0) < 0.06 || std::abs(r2 - 1.0) < 0.06) {
                continue; // isoceles shapes have no matched expanding rate
            }
            const SeedResult seed = seed_from_shape(r1, r2, alpha.value(), coef);
            if (!seed.ok) continue;
            if (seed.a2 < config.intensity_min || seed.a2 > config.intensity_max ||
                seed.a3 < config.intensity_min || seed.a3 > config.intensity_max) {
                continue;
            }
            const bool mirrored = seed.positions[2].y < 0.0;
            const double value = evaluate_mirrored({r1, r2, seed.a2, seed.a3}, mirrored);
            seeds.push_back({{r1, r2, seed.a2, seed.a3}, value});
            seed_mirrored.push_back(mirrored);
        }
    }
    if (seeds.empty()) {
        throw SearchFailureError("search_self_similar_triple: no admissible seed in the scan window",
                                 std::numeric_limits<double>::infinity());
    }

    std::vector<std::size_t> order(seeds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return seeds[a].value < seeds[b].value; });

    // Nelder-Mead on (r1, r2, a2, a3) for the best seeds
    Candidate best = seeds[order[0]];
    bool best_mirrored = seed_mirrored[order[0]];
    const std::size_t refine_count = std::min<std::size_t>(3, order.size());
    for (std::size_t s = 0; s < refine_count; ++s) {
        const bool mirrored = seed_mirrored[order[s]];
        auto f = [&](const std::array<double, 4>& x) { return evaluate_mirrored(x, mirrored); };

        std::array<Candidate, 5> simplex;
        simplex[0] = {seeds[order[s]].x, f(seeds[order[s]].x)};
        for (int d = 0; d < 4; ++d) {
            auto x = simplex[0].x;
            x[d] += (d < 2) ? 0.02 : 0.05 * std::max(1.0, std::abs(x[d]));
            simplex[d + 1] = {x, f(x)};
        }
        for (int it = 0; it < config.refine_iters; ++it) {
            std::sort(simplex.begin(), simplex.end(),
                      [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
            if (simplex[0].value < 1e-10) break;
            std::array<double, 4> centroid{0, 0, 0, 0};
            for (int v = 0; v < 4; ++v) {
                for (int d = 0; d < 4; ++d) centroid[d] += simplex[v].x[d] / 4.0;
            }
            auto blend = [&](double w) {
                std::array<double, 4> x;
                for (int d = 0; d < 4; ++d) x[d] = centroid[d] + w * (centroid[d] - simplex[4].x[d]);
                return x;
            };
            const auto xr = blend(1.0);
            const double fr = f(xr);
            if (fr < simplex[0].value) {
                const auto xe = blend(2.0);
                const double fe = f(xe);
                simplex[4] = fe < fr ? Candidate{xe, fe} : Candidate{xr, fr};
            } else if (fr < simplex[3].value) {
                simplex[4] = {xr, fr};
            } else {
                const auto xc = blend(-0.5);
                const double fc = f(xc);
                if (fc < simplex[4].value) {
                    simplex[4] = {xc, fc};
                } else {
                    for (int v = 1; v < 5; ++v) {
                        for (int d = 0; d < 4; ++d) {
                            simplex[v].x[d] = 0.5 * (simplex[v].x[d] + simplex[0].x[d]);
                        }
                        simplex[v].value = f(simplex[v].x);
                    }
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(),
                  [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
        if (simplex[0].value < best.value) {
            best = simplex[0];
            best_mirrored = mirrored;
        }
    }

    if (!(best.value <= config.residual_tol)) {
        throw SearchFailureError("search_self_similar_triple: best residual " +
                                     std::to_string(best.value) + " above tolerance " +
                                     std::to_string(config.residual_tol),
                                 best.value);
    }

    std::vector<Vec2> z;
    place_triangle(best.x[0], best.x[1], z);
    if (best_mirrored) z[2].y = -z[2].y;
    TripleSearchResult result;
    result.state = {z, {1.0, best.x[2], best.x[3]}, 0.0};
    result.residual = best.value;

    // fit g and p on a validation trajectory of the accepted candidate
    {
        const auto l0 = pair_distances(z);
        const double lmin = std::min({l0[0], l0[1], l0[2]});
        double amax = 0.0;
        for (double a : result.state.intensities) amax = std::max(amax, std::abs(a));
        const double tau = std::pow(lmin, alpha.value() + 2.0) / (coef * amax);
        const double dt = 1e-3 * tau;
        EventThresholds thresholds{1e-6 * lmin, 1e7 * result.state.diameter()};
        PseudoVortexState cur = result.state;
        PvTrajectory all;
        all.intensities = cur.intensities;
        double growth = 0.0;
        while (growth < 0.3 && all.samples() < 300000) {
            auto r = pv_integrate(cur, alpha, dt, cur.time + 100.0 * dt, thresholds);
            for (std::size_t k = (all.samples() == 0 ? 0 : 1); k < r.trajectory.samples(); ++k) {
                all.times.push_back(r.trajectory.times[k]);
                all.positions.push_back(r.trajectory.positions[k]);
            }
            cur = r.final_state;
            const auto l = pair_distances(cur.positions);
            growth = (l[0] / l0[0] + l[1] / l0[1] + l[2] / l0[2]) / 3.0 - 1.0;
            if (r.event.kind != EventKind::none) break;
        }
        const SelfSimilarFit fit = detect_self_similar_expansion(all);
        result.growth_rate = fit.growth_rate;
        result.exponent = fit.exponent;
    }
    return result;
}

CollapseProbe backward_collapse_probe(const PseudoVortexState& state, AlphaParam alpha,
                                      double growth_rate, double distance_floor) {
    if (!(growth_rate > 0.0)) {
        throw std::invalid_argument("backward_collapse_probe: growth rate must be positive");
    }
    if (!(distance_floor > 0.0)) {
        throw std::invalid_argument("backward_collapse_probe: distance floor must be positive");
    }

    CollapseProbe probe;
    PseudoVortexState current = state;
    const double t_collapse = state.time - 1.0 / growth_rate;
    EventThresholds thresholds{distance_floor, 1e7 * std::max(state.diameter(), 1.0)};

    const int steps_per_segment = 4000;
    const int record_stride = 100;
    for (int segment = 0; segment < 80; ++segment) {
        const double remaining = current.time - t_collapse;
        if (remaining < 1e-9 / growth_rate) break;
        const double duration = 0.5 * remaining;
        const double dt = -duration / steps_per_segment;
        IntegrationResult r;
        try {
            r = pv_integrate(current, alpha, dt, current.time - duration, thresholds);
        } catch (const StepRejectedError&) {
            break; // cannot resolve further; report what was reached
        }
        for (std::size_t k = 0; k < r.trajectory.samples(); k += record_stride) {
            probe.sample_times.push_back(r.trajectory.times[k]);
            probe.sample_min_distance.push_back(r.trajectory.min_pair_distance_at(k));
        }
        current = r.final_state;
        if (r.event.kind == EventKind::collapse) {
            probe.collapsed = true;
            probe.event_time = r.event.time;
            break;
        }
    }
    probe.min_distance = current.min_pairwise_distance();
    if (probe.collapsed) {
        probe.sample_times.push_back(probe.event_time);
        probe.sample_min_distance.push_back(probe.min_distance);
    } else {
        probe.event_time = current.time;
        probe.sample_times.push_back(current.time);
        probe.sample_min_distance.push_back(probe.min_distance);
    }
    return probe;
}

} // namespace msqg
