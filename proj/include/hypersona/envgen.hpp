#pragma once

#include <set>
#include <string>
#include <vector>

#include "hypersona/ingest.hpp"
#include "hypersona/matrix.hpp"
#include "hypersona/types.hpp"

namespace hypersona {

enum class Similarity { COSINE, EUCLIDEAN };

std::string similarity_name(Similarity s);
Similarity similarity_from_name(const std::string& name);

// How to build the social-environment hypergraph. Node and edge weights are
// preset; identity weights are the neutral default.
struct HyperedgeSpec {
    std::set<HyperedgeKind> kinds = {HyperedgeKind::TOP, HyperedgeKind::SEM, HyperedgeKind::FOR};
    int k_hop = 2;
    int knn_k = 10;
    Similarity similarity = Similarity::COSINE;
    double node_weight = 1.0;
    double edge_weight = 1.0;

    void validate() const;
};

// One hyperedge per node: {v} plus everything within k hops on the undirected
// view of the interaction edges (all edge kinds merged). Size-1 sets (isolated
// nodes) are dropped; duplicate member sets are removed, keeping the lowest
// generating node's edge.
std::vector<Hyperedge> topology_hyperedges(const std::vector<EdgeRecord>& edges, int num_nodes,
                                           int k_hop);

// One hyperedge per node: {v} plus its knn_k most similar other nodes.
// Ties break toward the lower node id. A zero-norm row under COSINE has
// similarity -inf to everything (a warning is recorded); it still forms a
// hyperedge from the tie-break ordering.
std::vector<Hyperedge> semantic_hyperedges(const FeatureMatrix& features, int knn_k,
                                           Similarity similarity,
                                           std::vector<std::string>* warnings = nullptr);

// One hyperedge per forum group with at least two members.
std::vector<Hyperedge> forum_hyperedges(const std::map<std::string, std::vector<int>>& group_index);

// Concatenates the requested families in TOP, SEM, FOR order, assigns dense
// edge ids, and presets U and W. `features` may be null unless SEM is
// requested. Nodes in no hyperedge stay in the graph as isolated nodes.
Hypergraph assemble(const HyperedgeSpec& spec, const DatasetBundle& bundle,
                    const FeatureMatrix* features, std::vector<std::string>* warnings = nullptr);

}  // namespace hypersona
