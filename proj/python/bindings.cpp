#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypersona/enhance.hpp"
#include "hypersona/envgen.hpp"
#include "hypersona/eval.hpp"
#include "hypersona/hgnn.hpp"
#include "hypersona/stats.hpp"
#include "hypersona/types.hpp"

namespace py = pybind11;
using namespace hypersona;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data().begin());
    return m;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

Hypergraph graph_from_lists(int num_nodes, const std::vector<std::vector<int>>& hyperedges,
                            const std::vector<double>& node_weights,
                            const std::vector<double>& edge_weights) {
    Hypergraph g;
    g.num_nodes = num_nodes;
    for (std::size_t k = 0; k < hyperedges.size(); ++k) {
        Hyperedge e;
        e.edge_id = static_cast<int>(k);
        e.kind = HyperedgeKind::FOR;
        e.members = hyperedges[k];
        std::sort(e.members.begin(), e.members.end());
        e.members.erase(std::unique(e.members.begin(), e.members.end()), e.members.end());
        g.edges.push_back(std::move(e));
    }
    g.node_weights = node_weights.empty()
                         ? std::vector<double>(static_cast<std::size_t>(num_nodes), 1.0)
                         : node_weights;
    g.edge_weights = edge_weights.empty() ? std::vector<double>(hyperedges.size(), 1.0)
                                          : edge_weights;
    g.validate();
    return g;
}

LabelScheme scheme_from_name(const std::string& name) {
    if (name == "mbti") return LabelScheme::MBTI16;
    if (name == "enneagram") return LabelScheme::ENNEAGRAM9;
    throw InvalidArgument("scheme must be \"mbti\" or \"enneagram\"");
}

}  // namespace

PYBIND11_MODULE(_hypersona, m) {
    m.doc() = "Core operations of the hypersona toolkit";

    py::register_exception<Error>(m, "HypersonaError");

    m.def(
        "parse_mbti",
        [](const std::string& code) {
            const MbtiCode parsed = parse_mbti(code);
            return py::make_tuple(py::make_tuple(parsed.dichotomies[0], parsed.dichotomies[1],
                                                 parsed.dichotomies[2], parsed.dichotomies[3]),
                                  parsed.class_index());
        },
        py::arg("code"), "Parse a 4-letter MBTI code into (bits, class_index).");

    m.def(
        "format_mbti", [](int class_index) { return format_mbti(mbti_from_class_index(class_index)); },
        py::arg("class_index"));

    m.def("parse_enneagram", &parse_enneagram, py::arg("raw"));

    m.def(
        "one_hot",
        [](const std::string& scheme, int class_index) {
            const auto v = one_hot({scheme_from_name(scheme), class_index});
            return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
        },
        py::arg("scheme"), py::arg("class_index"));

    m.def(
        "hash_embed",
        [](const std::vector<std::string>& texts, int dim) {
            EmbedderSpec spec;
            spec.dim = dim;
            return numpy_from_matrix(embed(spec, texts));
        },
        py::arg("texts"), py::arg("dim") = 384,
        "Signed-token-hash embedding, rows L2-normalized.");

    m.def(
        "topology_hyperedges",
        [](const std::vector<std::pair<int, int>>& edges, int num_nodes, int k_hop) {
            std::vector<EdgeRecord> records;
            for (const auto& [a, b] : edges) records.push_back({a, b, EdgeKind::OTHER});
            std::vector<std::vector<int>> out;
            for (const auto& e : topology_hyperedges(records, num_nodes, k_hop))
                out.push_back(e.members);
            return out;
        },
        py::arg("edges"), py::arg("num_nodes"), py::arg("k_hop") = 2);

    m.def(
        "semantic_hyperedges",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           int knn_k, const std::string& similarity) {
            const Matrix f = matrix_from_numpy(features);
            std::vector<std::vector<int>> out;
            for (const auto& e : semantic_hyperedges(f, knn_k, similarity_from_name(similarity)))
                out.push_back(e.members);
            return out;
        },
        py::arg("features"), py::arg("knn_k") = 10, py::arg("similarity") = "cosine");

    m.def(
        "degrees",
        [](int num_nodes, const std::vector<std::vector<int>>& hyperedges,
           const std::vector<double>& node_weights, const std::vector<double>& edge_weights) {
            const DegreeData deg =
                degrees(graph_from_lists(num_nodes, hyperedges, node_weights, edge_weights));
            return py::make_tuple(deg.d_v, deg.d_e);
        },
        py::arg("num_nodes"), py::arg("hyperedges"),
        py::arg("node_weights") = std::vector<double>{},
        py::arg("edge_weights") = std::vector<double>{});

    m.def(
        "propagation_dense",
        [](int num_nodes, const std::vector<std::vector<int>>& hyperedges,
           const std::vector<double>& node_weights, const std::vector<double>& edge_weights) {
            return numpy_from_matrix(
                propagation_operator(
                    graph_from_lists(num_nodes, hyperedges, node_weights, edge_weights))
                    .dense());
        },
        py::arg("num_nodes"), py::arg("hyperedges"),
        py::arg("node_weights") = std::vector<double>{},
        py::arg("edge_weights") = std::vector<double>{},
        "Dense N x N propagation operator (the second term of the Laplacian).");

    m.def(
        "propagation_apply",
        [](int num_nodes, const std::vector<std::vector<int>>& hyperedges,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
            return numpy_from_matrix(
                propagation_operator(graph_from_lists(num_nodes, hyperedges, {}, {}))
                    .apply(matrix_from_numpy(x)));
        },
        py::arg("num_nodes"), py::arg("hyperedges"), py::arg("x"));

    m.def(
        "focal_loss",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& probs,
           const std::vector<int>& labels, const std::vector<double>& weights, double gamma) {
            const Matrix p = matrix_from_numpy(probs);
            const std::vector<double> w =
                weights.empty() ? std::vector<double>(p.cols(), 1.0) : weights;
            const FocalLossResult r = focal_loss(p, labels, w, gamma);
            return py::make_tuple(r.loss, numpy_from_matrix(r.dscores));
        },
        py::arg("probs"), py::arg("labels"), py::arg("weights") = std::vector<double>{},
        py::arg("gamma") = 2.0,
        "Class-weighted focal loss and its gradient w.r.t. pre-softmax scores.");

    m.def("class_weights", &class_weights, py::arg("train_labels"), py::arg("num_classes"));

    m.def(
        "split",
        [](const std::vector<int>& ids, std::array<double, 3> ratios, std::uint64_t seed) {
            const SplitAssignment s = split(ids, ratios, seed);
            py::dict out;
            out["train"] = s.train;
            out["val"] = s.val;
            out["test"] = s.test;
            return out;
        },
        py::arg("ids"), py::arg("ratios") = std::array<double, 3>{0.8, 0.1, 0.1},
        py::arg("seed") = 0);

    m.def(
        "metrics",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& probs,
           const std::vector<int>& labels) {
            const MetricReport r = metrics(matrix_from_numpy(probs), labels);
            py::dict out;
            out["accuracy"] = r.accuracy;
            out["auc"] = r.auc;
            out["macro_f1"] = r.macro_f1;
            out["micro_f1"] = r.micro_f1;
            out["confusion"] = r.confusion;
            return out;
        },
        py::arg("probs"), py::arg("labels"));

    m.def(
        "train_model",
        [](int num_nodes, const std::vector<std::vector<int>>& hyperedges,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::vector<int>& labels, int num_classes, const std::vector<int>& train_ids,
           const std::vector<int>& val_ids, const py::dict& options) {
            TrainConfig config;
            if (options.contains("learning_rate"))
                config.learning_rate = options["learning_rate"].cast<double>();
            if (options.contains("weight_decay"))
                config.weight_decay = options["weight_decay"].cast<double>();
            if (options.contains("max_epochs"))
                config.max_epochs = options["max_epochs"].cast<int>();
            if (options.contains("layers")) config.layers = options["layers"].cast<int>();
            if (options.contains("hidden_dim"))
                config.hidden_dim = options["hidden_dim"].cast<int>();
            if (options.contains("focal_gamma"))
                config.focal_gamma = options["focal_gamma"].cast<double>();
            if (options.contains("seed")) config.seed = options["seed"].cast<std::uint64_t>();
            if (options.contains("patience")) config.patience = options["patience"].cast<int>();

            const PropagationOperator op =
                propagation_operator(graph_from_lists(num_nodes, hyperedges, {}, {}));
            const Matrix x0 = matrix_from_numpy(features);
            TrainResult result = train(op, x0, labels, num_classes, train_ids, val_ids, config);
            const Matrix probs = forward(op, x0, result.params, config, /*training=*/false);

            py::list history;
            for (const auto& e : result.history)
                history.append(py::make_tuple(e.epoch, e.train_loss, e.val_accuracy));
            py::dict out;
            out["probs"] = numpy_from_matrix(probs);
            out["history"] = history;
            out["best_epoch"] = result.best_epoch;
            out["best_val_accuracy"] = result.best_val_accuracy;
            return out;
        },
        py::arg("num_nodes"), py::arg("hyperedges"), py::arg("features"), py::arg("labels"),
        py::arg("num_classes"), py::arg("train_ids"), py::arg("val_ids"),
        py::arg("options") = py::dict(),
        "Transductive full-batch training; returns eval-mode probabilities and history.");

    m.def(
        "powerlaw_fit",
        [](const std::vector<std::int64_t>& values, std::optional<std::int64_t> xmin) {
            const PowerlawFit fit = powerlaw_fit(values, xmin);
            py::dict out;
            out["alpha"] = fit.alpha;
            out["xmin"] = fit.xmin;
            out["n_tail"] = fit.n_tail;
            out["ks"] = fit.ks;
            return out;
        },
        py::arg("values"), py::arg("xmin") = std::nullopt);

    m.attr("__version__") = "0.1.0";
}
