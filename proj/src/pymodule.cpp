#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "motormap/affinity.hpp"
#include "motormap/baselines.hpp"
#include "motormap/dataset.hpp"
#include "motormap/metrics.hpp"
#include "motormap/moogen.hpp"
#include "motormap/tsne.hpp"

namespace py = pybind11;
using namespace motormap;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2) throw py::value_error("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(buf.shape[0]), static_cast<std::size_t>(buf.shape[1]));
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + m.rows() * m.cols(), m.data().begin());
    return m;
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), arr.mutable_data());
    return arr;
}

ScaleMode scale_from_string(const std::string& s) { return parse_scale_mode(s); }

} // namespace

PYBIND11_MODULE(_motormap, m) {
    m.doc() = "Multi-objective design-candidate generation and t-SNE/PCA/Isomap maps";

    py::register_exception<Error>(m, "MotormapError");

    m.def(
        "pairwise_sq_distances",
        [](const DoubleArray& x) { return to_array(pairwise_sq_distances(to_matrix(x)).values); },
        py::arg("x"), "Squared Euclidean distance matrix of the rows of x.");

    m.def(
        "standardize",
        [](const DoubleArray& x, const std::string& mode) {
            return to_array(standardize_columns(to_matrix(x), scale_from_string(mode)));
        },
        py::arg("x"), py::arg("mode") = "zscore", "Column-wise zscore/minmax/none scaling.");

    m.def(
        "joint_affinities",
        [](const DoubleArray& x, double perplexity, bool shared_sigma) {
            const DistanceMatrix d = pairwise_sq_distances(to_matrix(x));
            const AffinityMatrix p = shared_sigma ? joint_affinities_shared_sigma(d, perplexity)
                                                  : joint_affinities(d, perplexity);
            return to_array(p.p);
        },
        py::arg("x"), py::arg("perplexity"), py::arg("shared_sigma") = false,
        "Symmetrized high-dimensional joint probabilities of the rows of x.");

    m.def(
        "tsne",
        [](const DoubleArray& x, std::size_t dim, double perplexity, int iterations, double learning_rate,
           std::uint64_t seed, bool early_exaggeration, bool shared_sigma) {
            const Matrix data = to_matrix(x);
            const DistanceMatrix d = pairwise_sq_distances(data);
            const double perp = perplexity > 0.0 ? perplexity : default_perplexity(data.rows());
            const AffinityMatrix p =
                shared_sigma ? joint_affinities_shared_sigma(d, perp) : joint_affinities(d, perp);
            TsneConfig cfg;
            cfg.perplexity = perp;
            cfg.out_dim = dim;
            cfg.iterations = iterations;
            cfg.learning_rate = learning_rate;
            cfg.seed = seed;
            cfg.exaggeration.enabled = early_exaggeration;
            const EmbeddingState state = run_tsne(p, cfg);
            py::list trace;
            for (const auto& [it, kl] : state.cost_trace) trace.append(py::make_tuple(it, kl));
            return py::make_tuple(to_array(state.y), trace);
        },
        py::arg("x"), py::arg("dim") = 2, py::arg("perplexity") = 0.0, py::arg("iterations") = 1000,
        py::arg("learning_rate") = 100.0, py::arg("seed") = 0, py::arg("early_exaggeration") = false,
        py::arg("shared_sigma") = false,
        "Exact t-SNE embedding; returns (Y, [(iteration, kl), ...]). perplexity=0 picks min(30, (N-1)/3).");

    m.def(
        "pca",
        [](const DoubleArray& x, std::size_t dim) {
            const PcaResult r = pca_project(to_matrix(x), dim);
            return py::make_tuple(to_array(r.projection), r.explained_variance_ratio);
        },
        py::arg("x"), py::arg("dim") = 2, "PCA projection; returns (Y, explained_variance_ratio).");

    m.def(
        "isomap",
        [](const DoubleArray& x, std::size_t k, std::size_t dim, const std::string& connect) {
            const IsomapResult r = isomap(to_matrix(x), k, dim, parse_connect_policy(connect));
            return py::make_tuple(to_array(r.points), r.embedded);
        },
        py::arg("x"), py::arg("k") = 10, py::arg("dim") = 2, py::arg("connect") = "largest",
        "Isomap embedding; returns (Y, embedded_mask). Unembedded rows of Y are zero.");

    m.def(
        "trustworthiness",
        [](const DoubleArray& x, const DoubleArray& y, std::size_t k) {
            return trustworthiness(to_matrix(x), to_matrix(y), k);
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 10);

    m.def(
        "knn_preservation",
        [](const DoubleArray& x, const DoubleArray& y, std::size_t k) {
            return knn_preservation(to_matrix(x), to_matrix(y), k);
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 10);

    m.def(
        "kmeans",
        [](const DoubleArray& y, std::size_t k, std::uint64_t seed, std::size_t restarts) {
            const KMeansResult r = kmeans(to_matrix(y), k, seed, restarts);
            return py::make_tuple(r.labels, to_array(r.centroids), r.inertia);
        },
        py::arg("y"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 4,
        "Lloyd's k-means with k-means++ seeding; returns (labels, centroids, inertia).");

    m.def(
        "silhouette",
        [](const DoubleArray& y, const std::vector<std::size_t>& labels) {
            return silhouette(to_matrix(y), labels);
        },
        py::arg("y"), py::arg("labels"));

    m.def(
        "generate",
        [](std::size_t pop_size, std::size_t generations, std::uint64_t seed, const std::string& single_op,
           bool keep_infeasible) {
            const SurrogateProblem problem =
                single_op.empty() ? SurrogateProblem::defaults() : SurrogateProblem::single_op(single_op);
            const GenerationResult res = nsga2_generate(problem, pop_size, generations, seed);
            const CandidateSet& set = keep_infeasible ? res.all : res.kept;
            py::dict out;
            out["ids"] = set.ids;
            out["params"] = to_array(set.params);
            out["objectives"] = to_array(set.objectives);
            out["param_names"] = set.param_names;
            out["objective_names"] = set.column_names;
            out["preservation_ratio"] = res.preservation_ratio;
            return out;
        },
        py::arg("pop_size") = 20, py::arg("generations") = 50, py::arg("seed") = 42, py::arg("single_op") = "",
        py::arg("keep_infeasible") = false,
        "NSGA-II candidate generation over the built-in machine surrogate.");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
