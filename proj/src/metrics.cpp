#include "motormap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "motormap/dataset.hpp"
#include "motormap/rng.hpp"

namespace motormap {

namespace {

// neighbor order per point: (distance, index) ascending, self excluded
std::vector<std::vector<std::size_t>> neighbor_order(const Matrix& points) {
    const std::size_t n = points.rows();
    const DistanceMatrix d = pairwise_sq_distances(points);
    std::vector<std::vector<std::size_t>> order(n);
    std::vector<std::pair<double, std::size_t>> keyed(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        keyed.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) keyed.emplace_back(d.values(i, j), j);
        std::sort(keyed.begin(), keyed.end());
        order[i].resize(keyed.size());
        for (std::size_t m = 0; m < keyed.size(); ++m) order[i][m] = keyed[m].second;
    }
    return order;
}

double sq_dist_rows(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        s += diff * diff;
    }
    return s;
}

struct LloydOutcome {
    std::vector<std::size_t> labels;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> trace;
    std::size_t repairs = 0;
};

LloydOutcome lloyd_once(const Matrix& y, std::size_t k, Rng& rng) {
    const std::size_t n = y.rows(), d = y.cols();

    // k-means++ seeding
    Matrix centroids(k, d);
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
    std::vector<bool> is_center(n, false);
    std::size_t first = uniform_index(rng, n);
    for (std::size_t c = 0; c < d; ++c) centroids(0, c) = y(first, c);
    is_center[first] = true;
    for (std::size_t m = 1; m < k; ++m) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_sq[i] = std::min(min_sq[i], sq_dist_rows(y, i, centroids, m - 1));
            total += min_sq[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_sq[i];
                if (acc > target) { // strict: zero-weight points are never re-picked
                    pick = i;
                    break;
                }
            }
        } else {
            // all remaining points coincide with centers; take the first free index
            for (std::size_t i = 0; i < n; ++i)
                if (!is_center[i]) {
                    pick = i;
                    break;
                }
        }
        is_center[pick] = true;
        for (std::size_t c = 0; c < d; ++c) centroids(m, c) = y(pick, c);
    }

    LloydOutcome out;
    out.labels.assign(n, 0);
    std::vector<std::size_t> counts(k, 0);

    for (int iter = 0; iter < 300; ++iter) {
        // assignment, ties to the lowest centroid index
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = sq_dist_rows(y, i, centroids, 0);
            for (std::size_t m = 1; m < k; ++m) {
                const double dd = sq_dist_rows(y, i, centroids, m);
                if (dd < best_d) {
                    best_d = dd;
                    best = m;
                }
            }
            if (out.labels[i] != best) changed = true;
            out.labels[i] = best;
        }
        if (!changed && iter > 0) break;

        // empty-cluster repair: hand over the farthest point
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) ++counts[out.labels[i]];
        for (std::size_t m = 0; m < k; ++m) {
            if (counts[m] > 0) continue;
            std::size_t farthest = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[out.labels[i]] <= 1) continue;
                const double dd = sq_dist_rows(y, i, centroids, out.labels[i]);
                if (dd > far_d) {
                    far_d = dd;
                    farthest = i;
                }
            }
            --counts[out.labels[farthest]];
            out.labels[farthest] = m;
            counts[m] = 1;
            ++out.repairs;
        }

        // update step
        centroids = Matrix(k, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) centroids(out.labels[i], c) += y(i, c);
        for (std::size_t m = 0; m < k; ++m)
            for (std::size_t c = 0; c < d; ++c) centroids(m, c) /= static_cast<double>(counts[m]);

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) inertia += sq_dist_rows(y, i, centroids, out.labels[i]);
        out.trace.push_back(inertia);
    }

    out.centroids = centroids;
    out.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) out.inertia += sq_dist_rows(y, i, centroids, out.labels[i]);
    return out;
}

} // namespace

double trustworthiness(const Matrix& x, const Matrix& y, std::size_t k) {
    const std::size_t n = x.rows();
    if (y.rows() != n) raise(errc::dimension_mismatch, "trustworthiness: row counts differ");
    if (k < 1 || 2 * k >= n)
        raise(errc::k_too_large, "trustworthiness needs 1 <= k < N/2 (k=" + std::to_string(k) +
                                     ", N=" + std::to_string(n) + ")");

    const auto order_x = neighbor_order(x);
    const auto order_y = neighbor_order(y);

    // rank of j as a neighbor of i in the original space, 1-based
    std::vector<std::size_t> rank(n);
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < order_x[i].size(); ++r) rank[order_x[i][r]] = r + 1;
        std::vector<bool> in_x(n, false);
        for (std::size_t m = 0; m < k; ++m) in_x[order_x[i][m]] = true;
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t j = order_y[i][m];
            if (!in_x[j]) penalty += static_cast<double>(rank[j] - k);
        }
    }
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * penalty;
}

double knn_preservation(const Matrix& x, const Matrix& y, std::size_t k) {
    const std::size_t n = x.rows();
    if (y.rows() != n) raise(errc::dimension_mismatch, "knn_preservation: row counts differ");
    if (k < 1 || k >= n) raise(errc::k_too_large, "knn_preservation needs 1 <= k < N");

    const auto order_x = neighbor_order(x);
    const auto order_y = neighbor_order(y);
    double total = 0.0;
    std::vector<bool> in_x(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(in_x.begin(), in_x.end(), false);
        for (std::size_t m = 0; m < k; ++m) in_x[order_x[i][m]] = true;
        std::size_t shared = 0;
        for (std::size_t m = 0; m < k; ++m)
            if (in_x[order_y[i][m]]) ++shared;
        total += static_cast<double>(shared) / static_cast<double>(k);
    }
    return total / static_cast<double>(n);
}

KMeansResult kmeans(const Matrix& y, std::size_t k, std::uint64_t seed, std::size_t restarts) {
    const std::size_t n = y.rows();
    if (k < 1 || k > n) raise(errc::bad_config, "kmeans needs 1 <= k <= N");
    if (restarts < 1) raise(errc::bad_config, "kmeans needs at least one restart");

    Rng rng(seed);
    KMeansResult best;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        LloydOutcome run = lloyd_once(y, k, rng);
        if (!have || run.inertia < best.inertia) {
            have = true;
            best.labels = std::move(run.labels);
            best.centroids = std::move(run.centroids);
            best.inertia = run.inertia;
            best.inertia_trace = std::move(run.trace);
            best.empty_cluster_repairs = run.repairs;
        }
    }
    return best;
}

double silhouette(const Matrix& y, const std::vector<std::size_t>& labels) {
    const std::size_t n = y.rows();
    if (labels.size() != n) raise(errc::dimension_mismatch, "silhouette: labels do not match points");

    const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> counts(k, 0);
    for (const std::size_t l : labels) ++counts[l];
    std::size_t non_empty = 0;
    for (const std::size_t c : counts)
        if (c > 0) ++non_empty;
    if (non_empty < 2) raise(errc::single_cluster, "silhouette needs at least two non-empty clusters");

    double total = 0.0;
    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[labels[j]] += std::sqrt(sq_dist_rows(y, i, y, j));
        }
        const std::size_t own = labels[i];
        if (counts[own] <= 1) continue; // singleton scores 0
        const double a = mean_dist[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < k; ++m) {
            if (m == own || counts[m] == 0) continue;
            b = std::min(b, mean_dist[m] / static_cast<double>(counts[m]));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

std::vector<std::string> pick_representatives(const std::vector<std::string>& ids,
                                              const std::vector<std::size_t>& labels, const Matrix& centroids,
                                              const Matrix& y) {
    const std::size_t n = y.rows();
    if (ids.size() != n || labels.size() != n)
        raise(errc::dimension_mismatch, "pick_representatives: ids/labels do not match points");

    std::vector<std::string> reps;
    for (std::size_t m = 0; m < centroids.rows(); ++m) {
        double best_d = std::numeric_limits<double>::infinity();
        std::size_t best_i = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != m) continue;
            const double dd = sq_dist_rows(y, i, centroids, m);
            if (dd < best_d) {
                best_d = dd;
                best_i = i;
            }
        }
        if (best_i < n) reps.push_back(ids[best_i]); // empty clusters produce no pick
    }
    return reps;
}

} // namespace motormap
