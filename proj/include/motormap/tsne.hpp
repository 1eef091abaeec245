#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "motormap/affinity.hpp"
#include "motormap/matrix.hpp"

namespace motormap {

inline constexpr double kQFloor = 1e-12;

/// Piecewise-constant momentum: `early` up to and including `switch_iter`,
/// `late` afterwards.
struct MomentumSchedule {
    double early = 0.5;
    double late = 0.8;
    int switch_iter = 250;

    double alpha(int t) const { return t <= switch_iter ? early : late; }
};

struct EarlyExaggeration {
    bool enabled = false;
    double factor = 4.0;
    int duration = 100;
};

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t out_dim = 2;
    int iterations = 1000;
    double learning_rate = 100.0;
    MomentumSchedule momentum;
    std::uint64_t seed = 0;
    EarlyExaggeration exaggeration;

    void validate() const;
};

/// Low-dimensional coordinates plus optimizer history.
struct EmbeddingState {
    Matrix y;      // N x d
    Matrix y_prev; // previous iterate, for momentum
    int iteration = 0;
    std::vector<std::pair<int, double>> cost_trace; // (iteration, KL)
};

/// Student-t similarities; `unnorm` keeps the raw (1+||yi-yj||^2)^-1 kernel
/// for reuse in the gradient.
struct QMatrix {
    Matrix q;      // normalized, sums to 1 over off-diagonal entries
    Matrix unnorm; // kernel values, zero diagonal
};

/// Y entries i.i.d. N(0, 1e-4), deterministic per seed.
EmbeddingState init_embedding(std::size_t n, std::size_t d, std::uint64_t seed);

QMatrix low_dim_affinities(const Matrix& y);

/// KL(P||Q) = sum_{i != j} p log(p / max(q, kQFloor)); the floor only guards
/// the log, the stored q is exact.
double kl_cost(const AffinityMatrix& p, const QMatrix& q);

/// Eq-style N-body force: grad_i = 4 sum_j (p_ij - q_ij)(y_i - y_j) k_ij.
Matrix gradient(const AffinityMatrix& p, const QMatrix& q, const Matrix& y);

/// Descent step with momentum, then re-centering to zero column mean.
EmbeddingState step(const EmbeddingState& state, const Matrix& grad, double learning_rate, double alpha);

EmbeddingState run_tsne(const AffinityMatrix& p, const TsneConfig& cfg);

} // namespace motormap
