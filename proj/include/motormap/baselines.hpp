#pragma once

#include <vector>

#include "motormap/dataset.hpp"

namespace motormap {

struct PcaResult {
    Matrix projection;                            // N x d
    Matrix components;                            // K x d, orthonormal columns
    std::vector<double> explained_variance_ratio; // d entries
};

/// Symmetrized k-nearest-neighbor graph; edge weights are Euclidean
/// distances (not squared).
struct NeighborGraph {
    std::size_t k = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency; // sorted by neighbor index
    std::size_t size() const { return adjacency.size(); }
};

enum class ConnectPolicy {
    strict,            // DisconnectedGraph error
    largest_component, // embed the largest component, flag the rest
    mst_bridge,        // bridge components with nearest-pair MST edges
};

ConnectPolicy parse_connect_policy(const std::string& text);

struct IsomapResult {
    Matrix points;              // N x d; unembedded rows are zero
    std::vector<bool> embedded; // false for points outside the kept component
};

/// Projection onto the top-d principal directions of the column-centered
/// data. Sign convention: each component's largest-magnitude entry is
/// positive (first such entry on ties).
PcaResult pca_project(const Matrix& x, std::size_t d);

/// Each point linked to its k nearest Euclidean neighbors (ties by smaller
/// index), then symmetrized by union.
NeighborGraph knn_graph(const Matrix& x, std::size_t k);

std::vector<std::vector<std::size_t>> connected_components(const NeighborGraph& g);

/// All-pairs shortest paths over the graph; entries are SQUARED path lengths
/// so the result satisfies DistanceMatrix semantics. Under `strict`, a
/// disconnected graph raises DisconnectedGraph listing the components; under
/// the other policies the caller is expected to route through isomap().
DistanceMatrix geodesic_distances(const NeighborGraph& g, ConnectPolicy policy = ConnectPolicy::strict);

/// Coordinates from squared distances: B = -1/2 J D J, top-d eigenpairs,
/// negative eigenvalues clamped to zero. Same sign convention as PCA.
Matrix classical_mds(const DistanceMatrix& d, std::size_t dim);

/// classical_mds(geodesic_distances(knn_graph(x, k)), d) with the configured
/// disconnection policy.
IsomapResult isomap(const Matrix& x, std::size_t k, std::size_t d,
                    ConnectPolicy policy = ConnectPolicy::largest_component);

} // namespace motormap
