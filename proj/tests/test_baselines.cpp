#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "motormap/baselines.hpp"
#include "motormap/symmetric_eigen.hpp"
#include "support/synthetic.hpp"

using namespace motormap;

namespace {

Matrix recovered_distances(const Matrix& coords) {
    const std::size_t n = coords.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < coords.cols(); ++c)
                s += (coords(i, c) - coords(j, c)) * (coords(i, c) - coords(j, c));
            d(i, j) = std::sqrt(s);
        }
    return d;
}

} // namespace

TEST_CASE("symmetric_eigen: residual, orthonormality and trace checks") {
    Rng rng(3);
    for (const std::size_t n : {2u, 5u, 30u, 120u}) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double v = 2.0 * uniform01(rng) - 1.0;
                a(i, j) = v;
                a(j, i) = v;
            }
        const EigenDecomposition eig = symmetric_eigen(a);

        double norm_a = 0.0, trace = 0.0, trace_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            trace += a(i, i);
            for (std::size_t j = 0; j < n; ++j) {
                norm_a += a(i, j) * a(i, j);
            }
        }
        double sum_l = 0.0, sum_l2 = 0.0;
        for (const double l : eig.values) {
            sum_l += l;
            sum_l2 += l * l;
        }
        trace_sq = norm_a; // ||A||_F^2 == sum lambda^2 for symmetric A
        CHECK(std::abs(sum_l - trace) < 1e-9 * std::max(1.0, std::abs(trace)));
        CHECK(std::abs(sum_l2 - trace_sq) < 1e-9 * std::max(1.0, trace_sq));

        // A v = lambda v
        const double scale = std::sqrt(norm_a);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0;
                for (std::size_t k = 0; k < n; ++k) av += a(i, k) * eig.vectors(k, j);
                CHECK(std::abs(av - eig.values[j] * eig.vectors(i, j)) < 1e-9 * std::max(1.0, scale));
            }
        }
        // V^T V = I
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p; q < n; ++q) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += eig.vectors(i, p) * eig.vectors(i, q);
                CHECK(std::abs(dot - (p == q ? 1.0 : 0.0)) < 1e-10);
            }
        // descending order
        for (std::size_t j = 1; j < n; ++j) CHECK(eig.values[j - 1] >= eig.values[j]);
    }
}

TEST_CASE("pca: collinear data is exactly one-dimensional") {
    Matrix x(5, 3);
    for (std::size_t i = 0; i < 5; ++i) {
        const double t = static_cast<double>(i + 1);
        x(i, 0) = t;
        x(i, 1) = 2.0 * t;
        x(i, 2) = 2.0 * t;
    }
    const PcaResult res = pca_project(x, 1);
    CHECK(std::abs(res.explained_variance_ratio[0] - 1.0) < 1e-10);
    // pairwise distances preserved
    const double step = 3.0; // |(1,2,2)|
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            const double got = std::abs(res.projection(i, 0) - res.projection(j, 0));
            const double want = step * std::abs(static_cast<double>(i) - static_cast<double>(j));
            CHECK(got == doctest::Approx(want).epsilon(1e-8));
        }
    // a second component exceeds the covariance rank
    try {
        pca_project(x, 2);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == errc::rank_deficient);
    }
}

TEST_CASE("pca: isotropic Gaussian spreads variance evenly") {
    Rng rng(7);
    const Matrix x = testsupport::random_gaussian_matrix(500, 3, rng);
    const PcaResult res = pca_project(x, 2);
    for (const double r : res.explained_variance_ratio) {
        CHECK(r > 0.25);
        CHECK(r < 0.45);
    }
    CHECK(res.explained_variance_ratio[0] >= res.explained_variance_ratio[1]);
}

TEST_CASE("pca: invariant to a constant row shift, components orthonormal") {
    Rng rng(9);
    const Matrix x = testsupport::random_matrix(40, 6, rng, 2.0);
    Matrix shifted = x;
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t c = 0; c < 6; ++c) shifted(i, c) += 3.0 + static_cast<double>(c);
    const PcaResult a = pca_project(x, 3);
    const PcaResult b = pca_project(shifted, 3);
    for (std::size_t i = 0; i < a.projection.data().size(); ++i)
        CHECK(std::abs(a.projection.data()[i] - b.projection.data()[i]) < 1e-10);

    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = p; q < 3; ++q) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 6; ++i) dot += a.components(i, p) * a.components(i, q);
            CHECK(std::abs(dot - (p == q ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("knn_graph: line 0,1,2,10 with k=1") {
    Matrix x(4, 1);
    x(1, 0) = 1.0;
    x(2, 0) = 2.0;
    x(3, 0) = 10.0;
    const NeighborGraph g = knn_graph(x, 1);
    auto has_edge = [&](std::size_t a, std::size_t b) {
        for (const auto& [j, w] : g.adjacency[a])
            if (j == b) return true;
        return false;
    };
    CHECK(has_edge(0, 1));
    CHECK(has_edge(1, 0));
    CHECK(has_edge(1, 2)); // 2's nearest is 1, union-symmetrized
    CHECK(has_edge(2, 3)); // 10's nearest is 2
    CHECK(!has_edge(0, 2));
    CHECK(!has_edge(0, 3));
    CHECK(!has_edge(1, 3));
}

TEST_CASE("knn_graph: equidistant triangle ties break to the lowest index") {
    // one-hot corners are exactly equidistant in floating point
    Matrix x(3, 3);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;
    x(2, 2) = 1.0;
    const NeighborGraph g = knn_graph(x, 1);
    // 0 -> 1, 1 -> 0, 2 -> 0; after union: 0-1, 0-2
    CHECK(g.adjacency[0].size() == 2);
    CHECK(g.adjacency[1].size() == 1);
    CHECK(g.adjacency[2].size() == 1);
    CHECK(g.adjacency[1][0].first == 0);
    CHECK(g.adjacency[2][0].first == 0);
    for (std::size_t i = 0; i < 3; ++i)
        for (const auto& [j, w] : g.adjacency[i]) {
            bool back = false;
            for (const auto& [jj, ww] : g.adjacency[j])
                if (jj == i) back = true;
            CHECK(back); // symmetric
        }
}

TEST_CASE("knn_graph: neighbor lists equal the full-sort oracle") {
    Rng rng(13);
    const Matrix x = testsupport::random_matrix(30, 4, rng);
    const std::size_t k = 5;
    const NeighborGraph g = knn_graph(x, k);

    // oracle: full sort per point, union
    std::vector<std::vector<std::size_t>> want(30);
    for (std::size_t i = 0; i < 30; ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < 30; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            all.emplace_back(s, j);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t m = 0; m < k; ++m) {
            want[i].push_back(all[m].second);
            want[all[m].second].push_back(i);
        }
    }
    for (auto& w : want) {
        std::sort(w.begin(), w.end());
        w.erase(std::unique(w.begin(), w.end()), w.end());
    }
    for (std::size_t i = 0; i < 30; ++i) {
        REQUIRE(g.adjacency[i].size() == want[i].size());
        for (std::size_t m = 0; m < want[i].size(); ++m) CHECK(g.adjacency[i][m].first == want[i][m]);
    }
}

TEST_CASE("geodesic_distances: path graph sums edges, squared output") {
    Matrix x(3, 1);
    x(1, 0) = 1.0;
    x(2, 0) = 2.0;
    const NeighborGraph g = knn_graph(x, 1);
    const DistanceMatrix d = geodesic_distances(g);
    CHECK(d.values(0, 2) == doctest::Approx(4.0).epsilon(1e-12)); // (1+1)^2
    CHECK(d.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.values(0, 0) == 0.0);
    CHECK(d.values(2, 0) == d.values(0, 2));
}

TEST_CASE("geodesic_distances: C-shaped set bends the geodesic") {
    // 20 points along three sides of a square, ends of the C close in space
    Matrix x(20, 2);
    for (std::size_t i = 0; i < 7; ++i) { // right arm top
        x(i, 0) = 1.0 - static_cast<double>(i) / 7.0;
        x(i, 1) = 1.0;
    }
    for (std::size_t i = 0; i < 7; ++i) { // left side
        x(7 + i, 0) = 0.0;
        x(7 + i, 1) = 1.0 - static_cast<double>(i + 1) / 7.0;
    }
    for (std::size_t i = 0; i < 6; ++i) { // bottom arm
        x(14 + i, 0) = static_cast<double>(i + 1) / 7.0;
        x(14 + i, 1) = 0.0;
    }
    const NeighborGraph g = knn_graph(x, 2);
    const DistanceMatrix d = geodesic_distances(g);
    const std::size_t tip_a = 0, tip_b = 19;
    double euclid_sq = 0.0;
    for (std::size_t c = 0; c < 2; ++c) euclid_sq += (x(tip_a, c) - x(tip_b, c)) * (x(tip_a, c) - x(tip_b, c));
    CHECK(d.values(tip_a, tip_b) > 4.0 * euclid_sq); // geodesic goes around the C

    // exhaustive relaxation oracle (Floyd-Warshall on sqrt lengths)
    const std::size_t n = 20;
    Matrix fw(n, n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) fw(i, i) = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, w] : g.adjacency[i]) fw(i, j) = w;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                fw(i, j) = std::min(fw(i, j), fw(i, k) + fw(k, j));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::sqrt(d.values(i, j)) == doctest::Approx(fw(i, j)).epsilon(1e-10));
}

TEST_CASE("geodesic_distances: complete graph reduces to Euclidean") {
    Rng rng(17);
    const Matrix x = testsupport::random_matrix(12, 3, rng);
    const NeighborGraph g = knn_graph(x, 11);
    const DistanceMatrix geo = geodesic_distances(g);
    const DistanceMatrix euc = pairwise_sq_distances(x);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j)
            CHECK(std::abs(geo.values(i, j) - euc.values(i, j)) < 1e-9);
}

TEST_CASE("geodesic properties: triangle inequality and >= Euclidean") {
    Rng rng(19);
    const Matrix x = testsupport::random_matrix(25, 3, rng);
    const NeighborGraph g = knn_graph(x, 4);
    if (connected_components(g).size() != 1) return; // only meaningful when connected
    const DistanceMatrix geo = geodesic_distances(g);
    const DistanceMatrix euc = pairwise_sq_distances(x);
    for (std::size_t a = 0; a < 25; ++a)
        for (std::size_t b = 0; b < 25; ++b) {
            CHECK(std::sqrt(geo.values(a, b)) >= std::sqrt(euc.values(a, b)) - 1e-12);
            for (std::size_t c = 0; c < 25; ++c)
                CHECK(std::sqrt(geo.values(a, b)) <=
                      std::sqrt(geo.values(a, c)) + std::sqrt(geo.values(c, b)) + 1e-12);
        }
}

TEST_CASE("geodesic_distances: strict policy reports the components") {
    Matrix x(6, 1);
    for (std::size_t i = 0; i < 3; ++i) x(i, 0) = static_cast<double>(i);
    for (std::size_t i = 3; i < 6; ++i) x(i, 0) = 100.0 + static_cast<double>(i);
    const NeighborGraph g = knn_graph(x, 1);
    try {
        geodesic_distances(g, ConnectPolicy::strict);
        FAIL("expected DisconnectedGraph");
    } catch (const Error& e) {
        CHECK(e.code() == errc::disconnected_graph);
        CHECK(std::string(e.what()).find("2 components") != std::string::npos);
    }
}

TEST_CASE("classical_mds: 3-4-5 triangle reproduces its distances") {
    DistanceMatrix d;
    d.values = Matrix(3, 3);
    d.values(0, 1) = d.values(1, 0) = 9.0;
    d.values(0, 2) = d.values(2, 0) = 16.0;
    d.values(1, 2) = d.values(2, 1) = 25.0;
    const Matrix coords = classical_mds(d, 2);
    const Matrix rec = recovered_distances(coords);
    CHECK(rec(0, 1) == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(rec(0, 2) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(rec(1, 2) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("classical_mds: zero distances collapse to the origin") {
    DistanceMatrix d;
    d.values = Matrix(4, 4);
    const Matrix coords = classical_mds(d, 2);
    for (const double v : coords.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("classical_mds: round-trips a random planar configuration") {
    Rng rng(23);
    const Matrix pts = testsupport::random_matrix(12, 2, rng, 4.0);
    const DistanceMatrix d = pairwise_sq_distances(pts);
    const Matrix coords = classical_mds(d, 2);
    const Matrix rec = recovered_distances(coords);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j)
            CHECK(std::abs(rec(i, j) - std::sqrt(d.values(i, j))) < 1e-8);
}

TEST_CASE("isomap: flat manifold embedded rigidly in 5-D is recovered") {
    Rng rng(29);
    // k = 6 on 7 points makes the graph complete, so geodesics are exact
    // plane distances and MDS reproduces them to machine precision
    const Matrix plane = testsupport::random_matrix(7, 2, rng, 2.0);
    const Matrix lifted = testsupport::random_isometry_embed(plane, 5, 31);
    const IsomapResult res = isomap(lifted, 6, 2, ConnectPolicy::strict);
    const Matrix orig_d = recovered_distances(plane);
    const Matrix rec_d = recovered_distances(res.points);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(rec_d(i, j) - orig_d(i, j)) < 1e-6);

    // denser cloud, sparse graph: graph geodesics still track the plane well
    const Matrix big = testsupport::random_matrix(40, 2, rng, 2.0);
    const Matrix big_lifted = testsupport::random_isometry_embed(big, 5, 33);
    const IsomapResult approx = isomap(big_lifted, 6, 2, ConnectPolicy::mst_bridge);
    const Matrix bd = recovered_distances(big);
    const Matrix bres = recovered_distances(approx.points);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = i + 1; j < 40; ++j) {
            a.push_back(bd(i, j));
            b.push_back(bres(i, j));
        }
    CHECK(testsupport::pearson(a, b) > 0.95);
}

TEST_CASE("isomap: k = N-1 coincides with classical MDS on Euclidean distances") {
    Rng rng(37);
    const Matrix x = testsupport::random_matrix(15, 4, rng);
    const IsomapResult iso = isomap(x, 14, 2, ConnectPolicy::strict);
    const Matrix mds = classical_mds(pairwise_sq_distances(x), 2);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t c = 0; c < 2; ++c) CHECK(iso.points(i, c) == doctest::Approx(mds(i, c)).epsilon(1e-9));
}

TEST_CASE("isomap: swiss roll geodesics track the chart distances") {
    const auto roll = testsupport::make_swiss_roll(300, 41);
    const NeighborGraph g = knn_graph(roll.points, 10);
    REQUIRE(connected_components(g).size() == 1);
    const DistanceMatrix geo = geodesic_distances(g);
    const DistanceMatrix chart = pairwise_sq_distances(roll.chart);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 300; ++i)
        for (std::size_t j = i + 1; j < 300; ++j) {
            a.push_back(std::sqrt(geo.values(i, j)));
            b.push_back(std::sqrt(chart.values(i, j)));
        }
    CHECK(testsupport::pearson(a, b) > 0.99);
}

TEST_CASE("isomap: disconnection policies") {
    // two far blobs that k=2 cannot bridge
    Matrix centers(2, 3);
    centers(1, 0) = 100.0;
    const auto blobs = testsupport::make_blobs(centers, 12, 0.5, 43);

    try {
        isomap(blobs.points, 2, 2, ConnectPolicy::strict);
        FAIL("expected DisconnectedGraph");
    } catch (const Error& e) {
        CHECK(e.code() == errc::disconnected_graph);
    }

    const IsomapResult largest = isomap(blobs.points, 2, 2, ConnectPolicy::largest_component);
    const std::size_t embedded =
        static_cast<std::size_t>(std::count(largest.embedded.begin(), largest.embedded.end(), true));
    CHECK(embedded == 12);
    for (std::size_t i = 0; i < 24; ++i)
        if (!largest.embedded[i])
            for (std::size_t c = 0; c < 2; ++c) CHECK(largest.points(i, c) == 0.0);

    const IsomapResult bridged = isomap(blobs.points, 2, 2, ConnectPolicy::mst_bridge);
    CHECK(std::count(bridged.embedded.begin(), bridged.embedded.end(), true) == 24);
    // with the bridge, the two blobs separate along the first axis
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < 12; ++i) mean_a += bridged.points(i, 0);
    for (std::size_t i = 12; i < 24; ++i) mean_b += bridged.points(i, 0);
    CHECK(std::abs(mean_a - mean_b) / 12.0 > 50.0);
}
