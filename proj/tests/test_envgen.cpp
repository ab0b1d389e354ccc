#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypersona/envgen.hpp"
#include "test_support.hpp"

using namespace hypersona;

namespace {

std::vector<EdgeRecord> as_edges(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<EdgeRecord> edges;
    for (const auto& [a, b] : pairs) edges.push_back({a, b, EdgeKind::FOLLOW});
    return edges;
}

}  // namespace

TEST_CASE("topology hyperedges on a path graph") {
    // 0-1-2-3, k=2: ball of 0 is {0,1,2}
    const auto edges = as_edges({{0, 1}, {1, 2}, {2, 3}});
    const auto tops = topology_hyperedges(edges, 4, 2);
    REQUIRE(tops.size() >= 1);
    CHECK(tops[0].members == std::vector<int>{0, 1, 2});
    for (const auto& e : tops) CHECK(e.kind == HyperedgeKind::TOP);
}

TEST_CASE("topology hyperedges dedupe and drop isolated nodes") {
    // K3 plus isolated node 3: one deduplicated hyperedge {0,1,2}
    const auto edges = as_edges({{0, 1}, {1, 2}, {0, 2}});
    const auto tops = topology_hyperedges(edges, 4, 2);
    REQUIRE(tops.size() == 1);
    CHECK(tops[0].members == std::vector<int>{0, 1, 2});
}

TEST_CASE("topology hyperedges agree with a shortest-path oracle on random graphs") {
    testsupport::Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(10));  // <= 12
        const int k = 1 + static_cast<int>(rng.uniform_int(3));
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng.uniform() < 0.25) pairs.emplace_back(a, b);

        const auto dist = testsupport::hop_distance_oracle(n, pairs);
        std::set<std::vector<int>> expected;
        for (int v = 0; v < n; ++v) {
            std::vector<int> ball;
            for (int u = 0; u < n; ++u)
                if (dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] <= k)
                    ball.push_back(u);
            if (ball.size() >= 2) expected.insert(ball);
        }

        const auto tops = topology_hyperedges(as_edges(pairs), n, k);
        std::set<std::vector<int>> got;
        for (const auto& e : tops) got.insert(e.members);
        CHECK(got == expected);
    }
}

TEST_CASE("semantic hyperedges pick the nearest neighbor under cosine") {
    FeatureMatrix f(3, 2);
    f(0, 0) = 1.0;
    f(1, 0) = 2.0;
    f(2, 1) = 1.0;
    const auto sems = semantic_hyperedges(f, 1, Similarity::COSINE);
    // node 0's neighbor is node 1 (cosine 1), and {0,1} == {1,0} dedup to one
    bool found01 = false;
    for (const auto& e : sems) found01 = found01 || e.members == std::vector<int>{0, 1};
    CHECK(found01);
    for (const auto& e : sems) {
        CHECK(e.kind == HyperedgeKind::SEM);
        CHECK(e.members.size() == 2);
    }
}

TEST_CASE("semantic ties break toward the lower node id") {
    // three orthogonal one-hot rows: all pairwise cosines are 0
    FeatureMatrix f(3, 3);
    for (int i = 0; i < 3; ++i) f(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = 1.0;
    const auto sems = semantic_hyperedges(f, 1, Similarity::COSINE);
    std::set<std::vector<int>> got;
    for (const auto& e : sems) got.insert(e.members);
    // 0 pairs with 1; 1 pairs with 0 (dup); 2 pairs with 0
    CHECK(got == std::set<std::vector<int>>{{0, 1}, {0, 2}});
}

TEST_CASE("semantic preconditions and zero-norm warnings") {
    FeatureMatrix f(3, 2);
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
    CHECK_THROWS_AS(semantic_hyperedges(f, 3, Similarity::COSINE), InvalidArgument);

    std::vector<std::string> warnings;
    const auto sems = semantic_hyperedges(f, 1, Similarity::COSINE, &warnings);
    CHECK(warnings.size() == 1);  // row 2 is all zeros
    // node 2 still forms a hyperedge
    bool has2 = false;
    for (const auto& e : sems)
        for (int m : e.members) has2 = has2 || m == 2;
    CHECK(has2);
}

TEST_CASE("semantic hyperedges agree with exhaustive similarity sorting") {
    testsupport::Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(13));  // <= 15
        const int d = 2 + static_cast<int>(rng.uniform_int(4));
        const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        FeatureMatrix f(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
        for (auto& v : f.data()) v = rng.uniform(-1.0, 1.0);
        const Similarity sim = trial % 2 == 0 ? Similarity::COSINE : Similarity::EUCLIDEAN;

        std::set<std::vector<int>> expected;
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<double, int>> scored;
            for (int u = 0; u < n; ++u) {
                if (u == v) continue;
                double s;
                if (sim == Similarity::COSINE) {
                    double dot = 0, na = 0, nb = 0;
                    for (int j = 0; j < d; ++j) {
                        dot += f(static_cast<std::size_t>(v), static_cast<std::size_t>(j)) *
                               f(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                        na += f(static_cast<std::size_t>(v), static_cast<std::size_t>(j)) *
                              f(static_cast<std::size_t>(v), static_cast<std::size_t>(j));
                        nb += f(static_cast<std::size_t>(u), static_cast<std::size_t>(j)) *
                              f(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                    }
                    s = dot / (std::sqrt(na) * std::sqrt(nb));
                } else {
                    double d2 = 0;
                    for (int j = 0; j < d; ++j) {
                        const double diff =
                            f(static_cast<std::size_t>(v), static_cast<std::size_t>(j)) -
                            f(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                        d2 += diff * diff;
                    }
                    s = -std::sqrt(d2);
                }
                scored.emplace_back(s, u);
            }
            std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            std::vector<int> members = {v};
            for (int i = 0; i < k; ++i) members.push_back(scored[static_cast<std::size_t>(i)].second);
            std::sort(members.begin(), members.end());
            if (members.size() >= 2) expected.insert(members);
        }

        const auto sems = semantic_hyperedges(f, k, sim);
        std::set<std::vector<int>> got;
        for (const auto& e : sems) got.insert(e.members);
        CHECK(got == expected);
    }
}

TEST_CASE("semantic hyperedges always contain the generating node, never as neighbor of itself") {
    testsupport::Rng rng(5);
    FeatureMatrix f(8, 3);
    for (auto& v : f.data()) v = rng.uniform(-1.0, 1.0);
    const auto sems = semantic_hyperedges(f, 3, Similarity::COSINE);
    for (const auto& e : sems) CHECK(e.members.size() == 4);
}

TEST_CASE("forum hyperedges translate groups directly") {
    std::map<std::string, std::vector<int>> groups;
    groups["book"] = {0, 3, 7};
    groups["solo"] = {1};
    groups["twin_a"] = {2, 4};
    groups["twin_b"] = {2, 4};
    const auto fors = forum_hyperedges(groups);
    REQUIRE(fors.size() == 2);  // solo dropped, twins dedup
    CHECK(fors[0].members == std::vector<int>{0, 3, 7});
    CHECK(fors[1].members == std::vector<int>{2, 4});
}

TEST_CASE("assemble concatenates families deterministically") {
    DatasetBundle bundle;
    for (int i = 0; i < 6; ++i) {
        UserRecord u;
        u.user_id = i;
        bundle.users.push_back(u);
    }
    bundle.edges.push_back({0, 1, EdgeKind::FOLLOW});
    bundle.edges.push_back({2, 3, EdgeKind::QUOTE});
    bundle.group_index["g1"] = {0, 1, 2};
    bundle.group_index["g2"] = {3, 4};

    FeatureMatrix f(6, 2);
    testsupport::Rng rng(3);
    for (auto& v : f.data()) v = rng.uniform(-1.0, 1.0);

    HyperedgeSpec spec;
    spec.knn_k = 2;
    const Hypergraph g1 = assemble(spec, bundle, &f);
    const Hypergraph g2 = assemble(spec, bundle, &f);
    REQUIRE(g1.edges.size() == g2.edges.size());
    for (std::size_t i = 0; i < g1.edges.size(); ++i) {
        CHECK(g1.edges[i].members == g2.edges[i].members);
        CHECK(g1.edges[i].kind == g2.edges[i].kind);
    }
    // ids dense, families ordered TOP then SEM then FOR
    for (std::size_t i = 0; i < g1.edges.size(); ++i)
        CHECK(g1.edges[i].edge_id == static_cast<int>(i));
    CHECK(g1.node_weights == std::vector<double>(6, 1.0));
    CHECK(g1.edge_weights == std::vector<double>(g1.edges.size(), 1.0));

    const auto count_kind = [&](HyperedgeKind k) {
        std::size_t c = 0;
        for (const auto& e : g1.edges) c += e.kind == k ? 1 : 0;
        return c;
    };
    HyperedgeSpec only_for;
    only_for.kinds = {HyperedgeKind::FOR};
    CHECK(assemble(only_for, bundle, nullptr).edges.size() == count_kind(HyperedgeKind::FOR));

    // edge count = sum of deduplicated family sizes
    HyperedgeSpec only_top;
    only_top.kinds = {HyperedgeKind::TOP};
    HyperedgeSpec only_sem;
    only_sem.kinds = {HyperedgeKind::SEM};
    only_sem.knn_k = 2;
    CHECK(g1.edges.size() == assemble(only_top, bundle, nullptr).edges.size() +
                                 assemble(only_sem, bundle, &f).edges.size() +
                                 count_kind(HyperedgeKind::FOR));
}

TEST_CASE("assemble guards") {
    DatasetBundle bundle;
    for (int i = 0; i < 3; ++i) {
        UserRecord u;
        u.user_id = i;
        bundle.users.push_back(u);
    }
    HyperedgeSpec sem_only;
    sem_only.kinds = {HyperedgeKind::SEM};
    CHECK_THROWS_AS(assemble(sem_only, bundle, nullptr), InvalidArgument);

    HyperedgeSpec for_only;
    for_only.kinds = {HyperedgeKind::FOR};
    CHECK_THROWS_AS(assemble(for_only, bundle, nullptr), InvalidArgument);  // no groups at all

    HyperedgeSpec empty_kinds;
    empty_kinds.kinds = {};
    CHECK_THROWS_AS(assemble(empty_kinds, bundle, nullptr), InvalidArgument);
}
