#include "motormap/tsne.hpp"

#include <cmath>

#include "motormap/rng.hpp"

namespace motormap {

void TsneConfig::validate() const {
    if (out_dim != 2 && out_dim != 3) raise(errc::bad_config, "out_dim must be 2 or 3");
    if (iterations < 1) raise(errc::bad_config, "iterations must be >= 1");
    if (!(learning_rate > 0.0)) raise(errc::bad_config, "learning rate must be positive");
    if (momentum.early < 0.0 || momentum.early >= 1.0 || momentum.late < 0.0 || momentum.late >= 1.0)
        raise(errc::bad_config, "momentum must lie in [0, 1)");
    if (exaggeration.enabled && (!(exaggeration.factor > 0.0) || exaggeration.duration < 0))
        raise(errc::bad_config, "bad early-exaggeration settings");
}

EmbeddingState init_embedding(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n < 2 || (d != 2 && d != 3)) raise(errc::bad_config, "init_embedding needs n >= 2 and d in {2,3}");
    Rng rng(seed);
    GaussianSampler gauss(rng);
    EmbeddingState state;
    state.y = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) state.y(i, j) = 1e-2 * gauss(); // sd 1e-2 => variance 1e-4
    state.y_prev = state.y;
    return state;
}

QMatrix low_dim_affinities(const Matrix& y) {
    const std::size_t n = y.rows(), d = y.cols();
    QMatrix out;
    out.q = Matrix(n, n);
    out.unnorm = Matrix(n, n);

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = y(i, c) - y(j, c);
                sq += diff * diff;
            }
            const double k = 1.0 / (1.0 + sq);
            out.unnorm(i, j) = k;
            out.unnorm(j, i) = k;
            z += 2.0 * k;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out.q(i, j) = out.unnorm(i, j) / z;
    return out;
}

double kl_cost(const AffinityMatrix& p, const QMatrix& q) {
    const std::size_t n = p.p.rows();
    require_same_shape(p.p, q.q, "kl_cost");
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double pij = p.p(i, j);
            if (pij <= 0.0) continue;
            const double qij = std::max(q.q(i, j), kQFloor);
            cost += pij * std::log(pij / qij);
        }
    return cost;
}

Matrix gradient(const AffinityMatrix& p, const QMatrix& q, const Matrix& y) {
    const std::size_t n = y.rows(), d = y.cols();
    require_same_shape(p.p, q.q, "gradient");
    if (q.q.rows() != n) raise(errc::dimension_mismatch, "gradient: P/Q size does not match Y");

    Matrix grad(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = 4.0 * (p.p(i, j) - q.q(i, j)) * q.unnorm(i, j);
            for (std::size_t c = 0; c < d; ++c) {
                const double f = w * (y(i, c) - y(j, c));
                grad(i, c) += f;
                grad(j, c) -= f;
            }
        }
    }
    return grad;
}

EmbeddingState step(const EmbeddingState& state, const Matrix& grad, double learning_rate, double alpha) {
    require_same_shape(state.y, grad, "step");
    const std::size_t n = state.y.rows(), d = state.y.cols();

    EmbeddingState next;
    next.cost_trace = state.cost_trace;
    next.iteration = state.iteration + 1;
    next.y_prev = state.y;
    next.y = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            next.y(i, c) = state.y(i, c) - learning_rate * grad(i, c) +
                           alpha * (state.y(i, c) - state.y_prev(i, c));

    // re-center to kill translational drift
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += next.y(i, c);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) next.y(i, c) -= mean;
    }

    for (const double v : next.y.data())
        if (!std::isfinite(v))
            raise(errc::non_finite_update,
                  "embedding diverged at iteration " + std::to_string(next.iteration) +
                      " (learning rate too large?)");
    return next;
}

EmbeddingState run_tsne(const AffinityMatrix& p, const TsneConfig& cfg) {
    cfg.validate();
    const std::size_t n = p.p.rows();

    AffinityMatrix working = p;
    const bool exaggerate = cfg.exaggeration.enabled && cfg.exaggeration.duration > 0;
    if (exaggerate)
        for (double& v : working.p.data()) v *= cfg.exaggeration.factor;

    EmbeddingState state = init_embedding(n, cfg.out_dim, cfg.seed);
    {
        const QMatrix q0 = low_dim_affinities(state.y);
        state.cost_trace.emplace_back(0, kl_cost(p, q0)); // trace always uses the true P
    }

    for (int t = 1; t <= cfg.iterations; ++t) {
        if (exaggerate && t == cfg.exaggeration.duration + 1) working = p;

        const QMatrix q = low_dim_affinities(state.y);
        const Matrix grad = gradient(working, q, state.y);
        try {
            state = step(state, grad, cfg.learning_rate, cfg.momentum.alpha(t));
        } catch (const Error& e) {
            raise(e.code(), std::string(e.what()) + " [t-SNE iteration " + std::to_string(t) + "]");
        }

        if (t % 10 == 0 || t == cfg.iterations) {
            const QMatrix qc = low_dim_affinities(state.y);
            state.cost_trace.emplace_back(t, kl_cost(p, qc));
        }
    }
    return state;
}

} // namespace motormap
