#ifndef MSQG_SELF_SIMILAR_HPP
#define MSQG_SELF_SIMILAR_HPP

#include "msqg/pseudo_vortex.hpp"

namespace msqg {

/// Result of fitting pairwise distances against L_ij(t) = L_ij(0) (1+gt)^p.
struct SelfSimilarFit {
    bool is_self_similar = false;
    double growth_rate = 0.0;  // g
    double exponent = 0.0;     // p
    double fit_residual = 0.0; // rms residual of the joint log-space fit
    double ratio_spread = 0.0; // worst relative disagreement of the three ratio curves
};

/// Joint least-squares fit of log L_ij(t) against p*log(1+gt) over the three
/// pairs of a 3-vortex trajectory. Requires N = 3 and at least 10 samples.
/// A trajectory with (numerically) constant distances is reported with
/// is_self_similar = false and exponent 0.
SelfSimilarFit detect_self_similar_expansion(const PvTrajectory& trajectory,
                                             double ratio_tol = 0.01,
                                             double residual_tol = 1e-4);

struct TripleSearchConfig {
    double ratio_min = 0.55;      // side ratios L13/L12, L23/L12 scanned
    double ratio_max = 2.05;
    int grid = 12;                // grid points per ratio axis
    double intensity_min = -10.0; // admissible intensity window for a2, a3
    double intensity_max = 10.0;
    double residual_tol = 1e-3;   // relative shape change per unit growth
    double horizon_growth = 1.15; // mean pair growth probed by one residual evaluation
    int refine_iters = 160;       // Nelder-Mead iterations per seed
};

struct TripleSearchResult {
    PseudoVortexState state;  // a_1 = 1, sides of order 1, positively oriented
    double residual;
    double growth_rate;       // fitted g of the accepted candidate, > 0
    double exponent;          // fitted p of the accepted candidate
};

/// Relative shape change per unit growth of a 3-vortex state, measured by
/// integrating the point system until the mean pairwise growth reaches
/// config.horizon_growth. Configurations that do not grow (relative
/// equilibria, e.g. the equal-intensity equilateral triple) score huge.
double self_similarity_residual(const PseudoVortexState& state, AlphaParam alpha,
                                const TripleSearchConfig& config);

/// Searches triangle shapes and intensities for an expanding self-similar
/// triple: a coarse scan over side ratios (intensities seeded per shape by
/// matching the three instantaneous distance growth rates, which is a linear
/// solve) followed by Nelder-Mead refinement of the integration residual over
/// (shape, intensities) jointly. Throws SearchFailureError with the best
/// residual when nothing reaches config.residual_tol.
TripleSearchResult search_self_similar_triple(AlphaParam alpha, const TripleSearchConfig& config);

/// Backward run of an expanding candidate toward its predicted collapse at
/// t = -1/g, in fixed-step segments whose dt shrinks with the remaining time
/// (the local dynamical time is proportional to it). Halts when the minimum
/// pairwise distance drops below distance_floor.
struct CollapseProbe {
    bool collapsed = false;
    double event_time = 0.0;          // halt time (< 0) when collapsed
    double min_distance = 0.0;        // minimum pairwise distance at halt
    std::vector<double> sample_times; // coarse (t, min distance) record
    std::vector<double> sample_min_distance;
};

CollapseProbe backward_collapse_probe(const PseudoVortexState& state, AlphaParam alpha,
                                      double growth_rate, double distance_floor);

} // namespace msqg

#endif
