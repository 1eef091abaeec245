#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motormap/matrix.hpp"

namespace motormap {

/// Embedding-quality scores plus the cluster/representative picks.
struct QualityReport {
    double trustworthiness = 0.0;
    double knn_preservation = 0.0;
    double silhouette = 0.0;
    std::size_t k_used = 0;
    std::vector<std::size_t> labels;
    std::vector<std::string> representative_ids;
};

/// Neighborhood-intrusion penalty: 1 when every low-dimensional neighbor was
/// already a high-dimensional one. Requires 1 <= k < N/2.
double trustworthiness(const Matrix& x, const Matrix& y, std::size_t k);

/// Mean fraction of shared k-nearest-neighbor sets between the two spaces.
double knn_preservation(const Matrix& x, const Matrix& y, std::size_t k);

struct KMeansResult {
    std::vector<std::size_t> labels;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> inertia_trace; // per Lloyd iteration of the winning restart
    std::size_t empty_cluster_repairs = 0;
};

/// Best-of-restarts Lloyd's algorithm with k-means++ seeding. Empty clusters
/// are repaired by reassigning the point farthest from its centroid (the
/// repair count is reported). Deterministic per (seed, restarts).
KMeansResult kmeans(const Matrix& y, std::size_t k, std::uint64_t seed, std::size_t restarts = 4);

/// Mean of (b - a) / max(a, b); singleton clusters score 0.
double silhouette(const Matrix& y, const std::vector<std::size_t>& labels);

/// For every non-empty cluster, the id whose embedded point lies nearest the
/// centroid (ties to the smaller row index), in cluster order.
std::vector<std::string> pick_representatives(const std::vector<std::string>& ids,
                                              const std::vector<std::size_t>& labels, const Matrix& centroids,
                                              const Matrix& y);

} // namespace motormap
