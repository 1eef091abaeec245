#include "motormap/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace motormap {

namespace {

// Floor off-diagonal entries, renormalize, floor again. The second floor
// restores entries >= eps exactly while the leftover mass error stays below
// ~N^2 * eps^2, well inside the 1e-10 unit-mass tolerance.
void floor_and_normalize(Matrix& p, double eps) {
    const std::size_t n = p.rows();
    for (int pass = 0; pass < 2; ++pass) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) {
                    if (p(i, j) < eps) p(i, j) = eps;
                    total += p(i, j);
                }
        if (pass == 1) break;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) p(i, j) /= total;
    }
}

void check_perplexity_range(double target, std::size_t n) {
    const double max_perp = static_cast<double>(n - 1);
    if (!(target > 1.0) || target > max_perp)
        raise(errc::perplexity_out_of_range,
              "perplexity " + std::to_string(target) + " outside (1, " + std::to_string(n - 1) +
                  "]; a distribution over " + std::to_string(n - 1) + " neighbors cannot exceed it");
}

} // namespace

double ConditionalRow::perplexity() const { return std::exp2(entropy_bits); }

ConditionalRow conditional_row(std::span<const double> sq_dist_row, std::size_t self_index, double beta) {
    const std::size_t n = sq_dist_row.size();
    if (n < 2) raise(errc::dimension_mismatch, "conditional_row needs at least 2 points");
    if (!(beta > 0.0)) raise(errc::bad_config, "beta must be positive");

    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (j != self_index) min_d = std::min(min_d, sq_dist_row[j]);

    ConditionalRow row;
    row.probs.assign(n, 0.0);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self_index) continue;
        const double w = std::exp(-beta * (sq_dist_row[j] - min_d));
        row.probs[j] = w;
        z += w;
    }
    if (!(z > 0.0) || !std::isfinite(z))
        raise(errc::degenerate_row, "conditional row " + std::to_string(self_index) + " cannot be normalized");

    double h = 0.0; // bits
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self_index) continue;
        const double p = row.probs[j] / z;
        row.probs[j] = p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    row.entropy_bits = h;
    return row;
}

BetaSearchResult search_beta(std::span<const double> sq_dist_row, std::size_t self_index, double target_perplexity,
                             double tol, int max_iter) {
    const std::size_t n = sq_dist_row.size();
    if (n < 2) raise(errc::dimension_mismatch, "search_beta needs at least 2 points");
    check_perplexity_range(target_perplexity, n);
    if (!(tol > 0.0)) raise(errc::bad_config, "tolerance must be positive");

    double beta = 1.0;
    ConditionalRow row = conditional_row(sq_dist_row, self_index, beta);
    double best_beta = beta;
    ConditionalRow best_row = row;
    double best_gap = std::abs(row.perplexity() - target_perplexity);
    if (best_gap <= tol) return {beta, row};

    // Perplexity is non-increasing in beta: bracket by doubling/halving.
    double lo = 0.0, hi = 0.0; // perp(lo) > target > perp(hi)
    bool bracketed = false;
    if (row.perplexity() > target_perplexity) {
        lo = beta;
        for (int it = 0; it < max_iter; ++it) {
            beta *= 2.0;
            row = conditional_row(sq_dist_row, self_index, beta);
            const double gap = std::abs(row.perplexity() - target_perplexity);
            if (gap < best_gap) {
                best_gap = gap;
                best_beta = beta;
                best_row = row;
            }
            if (gap <= tol) return {beta, row};
            if (row.perplexity() < target_perplexity) {
                hi = beta;
                bracketed = true;
                break;
            }
            lo = beta;
        }
    } else {
        hi = beta;
        for (int it = 0; it < max_iter; ++it) {
            beta *= 0.5;
            row = conditional_row(sq_dist_row, self_index, beta);
            const double gap = std::abs(row.perplexity() - target_perplexity);
            if (gap < best_gap) {
                best_gap = gap;
                best_beta = beta;
                best_row = row;
            }
            if (gap <= tol) return {beta, row};
            if (row.perplexity() > target_perplexity) {
                lo = beta;
                bracketed = true;
                break;
            }
            hi = beta;
        }
    }
    if (!bracketed) return {best_beta, best_row};

    for (int it = 0; it < max_iter; ++it) {
        beta = 0.5 * (lo + hi);
        row = conditional_row(sq_dist_row, self_index, beta);
        const double perp = row.perplexity();
        const double gap = std::abs(perp - target_perplexity);
        if (gap < best_gap) {
            best_gap = gap;
            best_beta = beta;
            best_row = row;
        }
        if (gap <= tol) return {beta, row};
        if (perp > target_perplexity) lo = beta;
        else hi = beta;
    }
    return {best_beta, best_row};
}

AffinityMatrix joint_affinities(const DistanceMatrix& dist, double perplexity) {
    const std::size_t n = dist.size();
    if (n < 2) raise(errc::dimension_mismatch, "joint_affinities needs at least 2 points");

    AffinityMatrix out;
    out.perplexity = perplexity;
    out.p = Matrix(n, n);
    out.betas.assign(n, 1.0);

    if (n == 2) {
        // the single off-diagonal conditional is 1 regardless of beta
        out.p(0, 1) = 0.5;
        out.p(1, 0) = 0.5;
        return out;
    }

    check_perplexity_range(perplexity, n);

    Matrix cond(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        BetaSearchResult res;
        try {
            res = search_beta(dist.values.row(i), i, perplexity);
        } catch (const Error& e) {
            raise(e.code(), "point " + std::to_string(i) + ": " + e.what());
        }
        out.betas[i] = res.beta;
        for (std::size_t j = 0; j < n; ++j) cond(i, j) = res.row.probs[j];
    }

    const double inv_2n = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out.p(i, j) = (cond(i, j) + cond(j, i)) * inv_2n;

    floor_and_normalize(out.p, kAffinityFloor);
    return out;
}

AffinityMatrix joint_affinities_shared_sigma(const DistanceMatrix& dist, double perplexity) {
    const std::size_t n = dist.size();
    if (n < 2) raise(errc::dimension_mismatch, "joint_affinities needs at least 2 points");

    AffinityMatrix out;
    out.perplexity = perplexity;
    out.p = Matrix(n, n);

    if (n == 2) {
        out.p(0, 1) = 0.5;
        out.p(1, 0) = 0.5;
        out.betas.assign(n, 1.0);
        return out;
    }

    check_perplexity_range(perplexity, n);

    auto mean_perplexity = [&](double beta) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += conditional_row(dist.values.row(i), i, beta).perplexity();
        return total / static_cast<double>(n);
    };

    // mean perplexity is non-increasing in beta, same bracketing scheme as
    // the per-point search
    double beta = 1.0;
    double perp = mean_perplexity(beta);
    double best_beta = beta, best_gap = std::abs(perp - perplexity);
    if (best_gap > kPerplexityTol) {
        double lo = 0.0, hi = 0.0;
        bool bracketed = false;
        if (perp > perplexity) {
            lo = beta;
            for (int it = 0; it < kBetaSearchMaxIter && !bracketed; ++it) {
                beta *= 2.0;
                perp = mean_perplexity(beta);
                if (std::abs(perp - perplexity) < best_gap) {
                    best_gap = std::abs(perp - perplexity);
                    best_beta = beta;
                }
                if (perp < perplexity) {
                    hi = beta;
                    bracketed = true;
                } else lo = beta;
            }
        } else {
            hi = beta;
            for (int it = 0; it < kBetaSearchMaxIter && !bracketed; ++it) {
                beta *= 0.5;
                perp = mean_perplexity(beta);
                if (std::abs(perp - perplexity) < best_gap) {
                    best_gap = std::abs(perp - perplexity);
                    best_beta = beta;
                }
                if (perp > perplexity) {
                    lo = beta;
                    bracketed = true;
                } else hi = beta;
            }
        }
        if (bracketed) {
            for (int it = 0; it < kBetaSearchMaxIter; ++it) {
                beta = 0.5 * (lo + hi);
                perp = mean_perplexity(beta);
                const double gap = std::abs(perp - perplexity);
                if (gap < best_gap) {
                    best_gap = gap;
                    best_beta = beta;
                }
                if (gap <= kPerplexityTol) break;
                if (perp > perplexity) lo = beta;
                else hi = beta;
            }
        }
    }
    out.betas.assign(n, best_beta);

    // single joint normalization of exp(-beta d_ij), stabilized by the
    // global off-diagonal minimum
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) min_d = std::min(min_d, dist.values(i, j));
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                const double w = std::exp(-best_beta * (dist.values(i, j) - min_d));
                out.p(i, j) = w;
                z += w;
            }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) out.p(i, j) /= z;

    floor_and_normalize(out.p, kAffinityFloor);
    return out;
}

double default_perplexity(std::size_t n) {
    if (n < 3) return 1.0; // joint_affinities special-cases N=2 anyway
    const double cap = static_cast<double>(n - 1);
    return std::min({30.0, std::max(2.0, (cap) / 3.0), cap});
}

} // namespace motormap
