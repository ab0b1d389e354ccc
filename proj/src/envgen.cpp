#include "hypersona/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace hypersona {

namespace {

// Appends `candidate` unless an identical member set of the same kind exists.
struct KindDeduper {
    std::set<std::vector<int>> seen;

    void add(std::vector<Hyperedge>& out, HyperedgeKind kind, std::vector<int> members) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (members.size() < 2) return;
        if (!seen.insert(members).second) return;
        Hyperedge e;
        e.edge_id = static_cast<int>(out.size());
        e.kind = kind;
        e.members = std::move(members);
        out.push_back(std::move(e));
    }
};

}  // namespace

std::string similarity_name(Similarity s) {
    return s == Similarity::COSINE ? "cosine" : "euclidean";
}

Similarity similarity_from_name(const std::string& name) {
    if (name == "cosine" || name == "COSINE") return Similarity::COSINE;
    if (name == "euclidean" || name == "EUCLIDEAN") return Similarity::EUCLIDEAN;
    throw ParseError("unknown similarity \"" + name + "\"");
}

void HyperedgeSpec::validate() const {
    if (kinds.empty()) throw InvalidArgument("hyperedge spec: kinds must be non-empty");
    if (k_hop < 1) throw InvalidArgument("hyperedge spec: k_hop must be >= 1");
    if (knn_k < 1) throw InvalidArgument("hyperedge spec: knn_k must be >= 1");
    if (!(node_weight > 0.0) || !(edge_weight > 0.0))
        throw InvalidArgument("hyperedge spec: preset weights must be positive");
}

std::vector<Hyperedge> topology_hyperedges(const std::vector<EdgeRecord>& edges, int num_nodes,
                                           int k_hop) {
    if (k_hop < 1) throw InvalidArgument("topology_hyperedges: k_hop must be >= 1");

    // Undirected adjacency over all interaction kinds merged.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_nodes));
    for (const auto& e : edges) {
        if (e.src < 0 || e.src >= num_nodes || e.dst < 0 || e.dst >= num_nodes)
            throw InvalidArgument("topology_hyperedges: edge endpoint out of range");
        adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    for (auto& nbrs : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }

    std::vector<Hyperedge> out;
    KindDeduper dedup;
    std::vector<int> depth(static_cast<std::size_t>(num_nodes), -1);
    for (int v = 0; v < num_nodes; ++v) {
        // Bounded BFS; only the k-hop ball is visited.
        std::vector<int> ball = {v};
        depth[static_cast<std::size_t>(v)] = 0;
        std::queue<int> frontier;
        frontier.push(v);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            const int du = depth[static_cast<std::size_t>(u)];
            if (du == k_hop) continue;
            for (int w : adj[static_cast<std::size_t>(u)]) {
                if (depth[static_cast<std::size_t>(w)] >= 0) continue;
                depth[static_cast<std::size_t>(w)] = du + 1;
                ball.push_back(w);
                frontier.push(w);
            }
        }
        for (int u : ball) depth[static_cast<std::size_t>(u)] = -1;
        dedup.add(out, HyperedgeKind::TOP, std::move(ball));
    }
    return out;
}

std::vector<Hyperedge> semantic_hyperedges(const FeatureMatrix& features, int knn_k,
                                           Similarity similarity,
                                           std::vector<std::string>* warnings) {
    const int n = static_cast<int>(features.rows());
    if (knn_k < 1) throw InvalidArgument("semantic_hyperedges: knn_k must be >= 1");
    if (knn_k >= n)
        throw InvalidArgument("semantic_hyperedges: knn_k must be < number of nodes (" +
                              std::to_string(knn_k) + " >= " + std::to_string(n) + ")");
    if (!features.all_finite())
        throw InvalidArgument("semantic_hyperedges: features contain non-finite values");

    std::vector<double> norms(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = features.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < features.cols(); ++j) s += row[j] * row[j];
        norms[static_cast<std::size_t>(i)] = std::sqrt(s);
        if (similarity == Similarity::COSINE && s == 0.0 && warnings)
            warnings->push_back("semantic_hyperedges: node " + std::to_string(i) +
                                " has a zero-norm feature row; its similarities are undefined");
    }

    const double neg_inf = -std::numeric_limits<double>::infinity();
    auto pair_similarity = [&](int a, int b) -> double {
        const double* ra = features.row(static_cast<std::size_t>(a));
        const double* rb = features.row(static_cast<std::size_t>(b));
        if (similarity == Similarity::COSINE) {
            const double na = norms[static_cast<std::size_t>(a)];
            const double nb = norms[static_cast<std::size_t>(b)];
            if (na == 0.0 || nb == 0.0) return neg_inf;
            double dot = 0.0;
            for (std::size_t j = 0; j < features.cols(); ++j) dot += ra[j] * rb[j];
            return dot / (na * nb);
        }
        double d2 = 0.0;
        for (std::size_t j = 0; j < features.cols(); ++j) {
            const double diff = ra[j] - rb[j];
            d2 += diff * diff;
        }
        return -std::sqrt(d2);
    };

    std::vector<Hyperedge> out;
    KindDeduper dedup;
    std::vector<std::pair<double, int>> scored(static_cast<std::size_t>(n) - 1);
    for (int v = 0; v < n; ++v) {
        std::size_t idx = 0;
        for (int u = 0; u < n; ++u) {
            if (u == v) continue;
            scored[idx++] = {pair_similarity(v, u), u};
        }
        // Highest similarity first, lower id wins ties.
        std::partial_sort(scored.begin(), scored.begin() + knn_k, scored.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        std::vector<int> members = {v};
        for (int i = 0; i < knn_k; ++i) members.push_back(scored[static_cast<std::size_t>(i)].second);
        dedup.add(out, HyperedgeKind::SEM, std::move(members));
    }
    return out;
}

std::vector<Hyperedge> forum_hyperedges(
    const std::map<std::string, std::vector<int>>& group_index) {
    std::vector<Hyperedge> out;
    KindDeduper dedup;
    for (const auto& [name, members] : group_index) {
        (void)name;
        dedup.add(out, HyperedgeKind::FOR, members);
    }
    return out;
}

Hypergraph assemble(const HyperedgeSpec& spec, const DatasetBundle& bundle,
                    const FeatureMatrix* features, std::vector<std::string>* warnings) {
    spec.validate();
    const int n = bundle.num_users();
    if (spec.kinds.count(HyperedgeKind::SEM)) {
        if (features == nullptr)
            throw InvalidArgument("assemble: SEM hyperedges requested but no features provided");
        if (static_cast<int>(features->rows()) != n)
            throw InvalidArgument("assemble: feature rows != number of users");
    }

    Hypergraph graph;
    graph.num_nodes = n;

    auto append = [&](std::vector<Hyperedge>&& family) {
        for (auto& e : family) {
            e.edge_id = static_cast<int>(graph.edges.size());
            graph.edges.push_back(std::move(e));
        }
    };

    if (spec.kinds.count(HyperedgeKind::TOP))
        append(topology_hyperedges(bundle.edges, n, spec.k_hop));
    if (spec.kinds.count(HyperedgeKind::SEM))
        append(semantic_hyperedges(*features, spec.knn_k, spec.similarity, warnings));
    if (spec.kinds.count(HyperedgeKind::FOR)) append(forum_hyperedges(bundle.group_index));

    if (graph.edges.empty())
        throw InvalidArgument("assemble: no hyperedges could be built; the graph is untrainable");

    graph.node_weights.assign(static_cast<std::size_t>(n), spec.node_weight);
    graph.edge_weights.assign(graph.edges.size(), spec.edge_weight);
    graph.validate();
    return graph;
}

}  // namespace hypersona
