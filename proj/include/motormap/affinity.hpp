#pragma once

#include <span>
#include <vector>

#include "motormap/dataset.hpp"

namespace motormap {

/// Gaussian conditional distribution of one point over all others, with its
/// Shannon entropy in bits. probs[self] is 0 and the rest sum to 1.
struct ConditionalRow {
    std::vector<double> probs;
    double entropy_bits = 0.0;

    double perplexity() const; // 2^H
};

/// Symmetrized joint probabilities p_ij with the per-point precisions that
/// produced them. Entries are floored at kAffinityFloor and sum to 1.
struct AffinityMatrix {
    Matrix p;
    double perplexity = 0.0;
    std::vector<double> betas; // beta_i = 1/(2 sigma_i^2)
};

inline constexpr double kAffinityFloor = 1e-12;
inline constexpr double kPerplexityTol = 1e-5;
inline constexpr int kBetaSearchMaxIter = 50;

/// probs[j] proportional to exp(-beta * dist[j]) over j != self, stabilized by
/// shifting by the off-diagonal minimum before exponentiation.
ConditionalRow conditional_row(std::span<const double> sq_dist_row, std::size_t self_index, double beta);

struct BetaSearchResult {
    double beta = 1.0;
    ConditionalRow row;
};

/// Bisection on beta until |2^H - target| <= tol (doubling/halving from
/// beta = 1 to bracket first). Returns the best bracketing beta if max_iter
/// runs out.
BetaSearchResult search_beta(std::span<const double> sq_dist_row, std::size_t self_index, double target_perplexity,
                             double tol = kPerplexityTol, int max_iter = kBetaSearchMaxIter);

/// Per-point conditionals symmetrized as p_ij = (p_{j|i} + p_{i|j}) / (2N).
AffinityMatrix joint_affinities(const DistanceMatrix& dist, double perplexity);

/// Literal single-sigma reading: one shared beta calibrated so the mean
/// per-row perplexity matches the target, then a single joint normalization.
AffinityMatrix joint_affinities_shared_sigma(const DistanceMatrix& dist, double perplexity);

/// min(30, (N-1)/3) clamped into the valid (1, N-1] range.
double default_perplexity(std::size_t n);

} // namespace motormap
