#include "motormap/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "motormap/symmetric_eigen.hpp"

namespace motormap {

namespace {

// flip columns so the largest-magnitude entry is positive
void apply_sign_convention(Matrix& cols) {
    for (std::size_t j = 0; j < cols.cols(); ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < cols.rows(); ++i) {
            const double mag = std::abs(cols(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (cols(arg, j) < 0.0)
            for (std::size_t i = 0; i < cols.rows(); ++i) cols(i, j) = -cols(i, j);
    }
}

Matrix center_columns(const Matrix& x) {
    Matrix out = x;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, c);
        mean /= static_cast<double>(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) out(i, c) -= mean;
    }
    return out;
}

std::string describe_components(const std::vector<std::vector<std::size_t>>& comps) {
    std::string msg = std::to_string(comps.size()) + " components of sizes";
    for (const auto& c : comps) msg += " " + std::to_string(c.size());
    return msg;
}

// single-source shortest paths, edge weights positive
void dijkstra(const NeighborGraph& g, std::size_t source, std::vector<double>& dist) {
    const double inf = std::numeric_limits<double>::infinity();
    dist.assign(g.size(), inf);
    dist[source] = 0.0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : g.adjacency[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
}

NeighborGraph bridge_components_mst(const NeighborGraph& g, const Matrix& x,
                                    const std::vector<std::vector<std::size_t>>& comps) {
    // nearest point pair between every pair of components
    const std::size_t m = comps.size();
    struct Bridge {
        double dist;
        std::size_t a, b;
    };
    std::vector<std::vector<Bridge>> best(m, std::vector<Bridge>(m, {std::numeric_limits<double>::infinity(), 0, 0}));
    for (std::size_t ca = 0; ca < m; ++ca)
        for (std::size_t cb = ca + 1; cb < m; ++cb) {
            Bridge b = best[ca][cb];
            for (std::size_t i : comps[ca])
                for (std::size_t j : comps[cb]) {
                    double sq = 0.0;
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        const double diff = x(i, c) - x(j, c);
                        sq += diff * diff;
                    }
                    const double d = std::sqrt(sq);
                    if (d < b.dist) b = {d, i, j};
                }
            best[ca][cb] = b;
            best[cb][ca] = b;
        }

    // Prim over the component graph
    NeighborGraph out = g;
    std::vector<bool> in_tree(m, false);
    in_tree[0] = true;
    for (std::size_t added = 1; added < m; ++added) {
        double bd = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < m; ++a) {
            if (!in_tree[a]) continue;
            for (std::size_t b = 0; b < m; ++b) {
                if (in_tree[b]) continue;
                if (best[a][b].dist < bd) {
                    bd = best[a][b].dist;
                    ba = a;
                    bb = b;
                }
            }
        }
        in_tree[bb] = true;
        const Bridge& br = best[ba][bb];
        out.adjacency[br.a].emplace_back(br.b, br.dist);
        out.adjacency[br.b].emplace_back(br.a, br.dist);
    }
    for (auto& adj : out.adjacency) std::sort(adj.begin(), adj.end());
    return out;
}

} // namespace

ConnectPolicy parse_connect_policy(const std::string& text) {
    if (text == "strict") return ConnectPolicy::strict;
    if (text == "largest") return ConnectPolicy::largest_component;
    if (text == "mst") return ConnectPolicy::mst_bridge;
    raise(errc::bad_config, "unknown connect policy '" + text + "' (strict|largest|mst)");
}

PcaResult pca_project(const Matrix& x, std::size_t d) {
    const std::size_t n = x.rows(), k = x.cols();
    if (n < 2 || d < 1 || d > std::min(n - 1, k))
        raise(errc::bad_config, "pca_project needs 1 <= d <= min(N-1, K)");

    const Matrix xc = center_columns(x);

    // sample covariance, K x K
    Matrix cov(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += xc(i, a) * xc(i, b);
            s /= static_cast<double>(n - 1);
            cov(a, b) = s;
            cov(b, a) = s;
        }

    EigenDecomposition eig = symmetric_eigen(cov);
    for (double& v : eig.values) v = std::max(v, 0.0);

    const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
    const double rank_tol = eig.values.empty() ? 0.0 : eig.values[0] * 1e-12;
    std::size_t rank = 0;
    for (const double v : eig.values)
        if (v > rank_tol) ++rank;
    if (d > rank)
        raise(errc::rank_deficient,
              "requested " + std::to_string(d) + " components but covariance rank is " + std::to_string(rank));

    PcaResult res;
    res.components = Matrix(k, d);
    res.explained_variance_ratio.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        res.explained_variance_ratio[j] = total > 0.0 ? eig.values[j] / total : 0.0;
        for (std::size_t i = 0; i < k; ++i) res.components(i, j) = eig.vectors(i, j);
    }
    apply_sign_convention(res.components);

    res.projection = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) s += xc(i, c) * res.components(c, j);
            res.projection(i, j) = s;
        }
    return res;
}

NeighborGraph knn_graph(const Matrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    if (k < 1 || k >= n) raise(errc::bad_config, "knn_graph needs 1 <= k < N");

    const DistanceMatrix sq = pairwise_sq_distances(x);
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);

    std::vector<std::pair<double, std::size_t>> order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.emplace_back(sq.values(i, j), j);
        // ties by smaller index: pair compare does exactly that
        std::sort(order.begin(), order.end());
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t j = order[m].second;
            const double w = std::sqrt(order[m].first);
            adj[i].emplace_back(j, w);
        }
    }

    // union-symmetrize
    NeighborGraph g;
    g.k = k;
    g.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, w] : adj[i]) {
            g.adjacency[i].emplace_back(j, w);
            g.adjacency[j].emplace_back(i, w);
        }
    for (auto& a : g.adjacency) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

std::vector<std::vector<std::size_t>> connected_components(const NeighborGraph& g) {
    const std::size_t n = g.size();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<std::size_t> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            out[id].push_back(u);
            for (const auto& edge : g.adjacency[u])
                if (comp[edge.first] < 0) {
                    comp[edge.first] = id;
                    stack.push_back(edge.first);
                }
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;
}

DistanceMatrix geodesic_distances(const NeighborGraph& g, ConnectPolicy policy) {
    const std::size_t n = g.size();
    const auto comps = connected_components(g);
    if (comps.size() > 1 && policy == ConnectPolicy::strict)
        raise(errc::disconnected_graph, "neighbor graph is disconnected: " + describe_components(comps));

    DistanceMatrix out;
    out.values = Matrix(n, n);
    std::vector<double> dist;
    for (std::size_t s = 0; s < n; ++s) {
        dijkstra(g, s, dist);
        for (std::size_t t = 0; t < n; ++t)
            out.values(s, t) = std::isinf(dist[t]) ? std::numeric_limits<double>::infinity() : dist[t] * dist[t];
    }
    return out;
}

Matrix classical_mds(const DistanceMatrix& d, std::size_t dim) {
    const std::size_t n = d.size();
    if (n < 1 || dim < 1) raise(errc::bad_config, "classical_mds needs N >= 1 and d >= 1");

    // B = -1/2 J D J via row/column/grand means
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += d.values(i, j);
        row_mean[i] /= static_cast<double>(n);
        grand += row_mean[i];
    }
    grand /= static_cast<double>(n);

    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (d.values(i, j) - row_mean[i] - row_mean[j] + grand);

    EigenDecomposition eig = symmetric_eigen(b);

    Matrix coords(n, dim);
    for (std::size_t j = 0; j < dim && j < n; ++j) {
        const double scale = std::sqrt(std::max(eig.values[j], 0.0));
        for (std::size_t i = 0; i < n; ++i) coords(i, j) = eig.vectors(i, j) * scale;
    }
    apply_sign_convention(coords);
    return coords;
}

IsomapResult isomap(const Matrix& x, std::size_t k, std::size_t d, ConnectPolicy policy) {
    const std::size_t n = x.rows();
    NeighborGraph g = knn_graph(x, k);
    auto comps = connected_components(g);

    IsomapResult res;
    res.points = Matrix(n, d);
    res.embedded.assign(n, true);

    if (comps.size() > 1) {
        switch (policy) {
            case ConnectPolicy::strict:
                raise(errc::disconnected_graph, "neighbor graph is disconnected: " + describe_components(comps));
            case ConnectPolicy::mst_bridge:
                g = bridge_components_mst(g, x, comps);
                break;
            case ConnectPolicy::largest_component: {
                std::size_t best = 0;
                for (std::size_t c = 1; c < comps.size(); ++c)
                    if (comps[c].size() > comps[best].size()) best = c;
                const std::vector<std::size_t>& keep = comps[best];
                res.embedded.assign(n, false);
                for (std::size_t i : keep) res.embedded[i] = true;

                // embed the kept component only
                NeighborGraph sub;
                sub.k = k;
                sub.adjacency.assign(keep.size(), {});
                std::vector<std::size_t> local(n, 0);
                for (std::size_t li = 0; li < keep.size(); ++li) local[keep[li]] = li;
                for (std::size_t li = 0; li < keep.size(); ++li)
                    for (const auto& [j, w] : g.adjacency[keep[li]])
                        if (res.embedded[j]) sub.adjacency[li].emplace_back(local[j], w);
                const Matrix coords = classical_mds(geodesic_distances(sub, ConnectPolicy::strict), d);
                for (std::size_t li = 0; li < keep.size(); ++li)
                    for (std::size_t c = 0; c < d; ++c) res.points(keep[li], c) = coords(li, c);
                return res;
            }
        }
    }

    res.points = classical_mds(geodesic_distances(g, ConnectPolicy::strict), d);
    return res;
}

} // namespace motormap
