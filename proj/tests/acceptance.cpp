// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the path of the hypersona CLI binary (used by the
// offline end-to-end criterion).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "hypersona/enhance.hpp"
#include "hypersona/envgen.hpp"
#include "hypersona/eval.hpp"
#include "hypersona/fixture.hpp"
#include "hypersona/hgnn.hpp"
#include "hypersona/ingest.hpp"
#include "hypersona/io.hpp"
#include "hypersona/stats.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace hypersona;

namespace {

std::string g_binary;

enum class Outcome { PASS, FAIL, SKIP };

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome(std::string&)> run;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cmd(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

// Shared planted fixture: 200 nodes, 4 classes, 20 groups at 90% purity,
// mock narratives hash-embedded so features carry the group name.
struct Planted {
    DatasetBundle bundle;
    FeatureMatrix features;
    ExperimentContext ctx;
};

const Planted& planted() {
    static const Planted fixture = [] {
        Planted p;
        FixtureConfig fc;
        fc.num_users = 200;
        fc.num_groups = 20;
        fc.num_classes = 4;
        fc.purity = 0.9;
        fc.seed = 9;
        p.bundle = make_planted_bundle(fc);

        MockLlmClient mock;
        std::vector<std::string> narratives;
        for (const auto& user : strip_labels(p.bundle).users)
            narratives.push_back(mock.complete(build_prompt(user).rendered, 0.0));
        EmbedderSpec spec;
        spec.dim = 128;
        p.features = embed(spec, narratives);

        p.ctx.bundle = &p.bundle;
        p.ctx.source = FeatureSource::ENHANCED;
        p.ctx.enhanced = &p.features;
        p.ctx.scheme = LabelScheme::MBTI16;
        return p;
    }();
    return fixture;
}

Outcome operator_correctness(std::string& detail) {
    testsupport::Rng rng(4011);
    double worst_entry = 0.0, worst_asym = 0.0, worst_eig = 0.0, worst_fixed = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        // Entrywise oracle and symmetry under fully random positive U and W.
        const Hypergraph g = testsupport::random_hypergraph(rng, 10, 6, false, false);
        const Matrix dense = propagation_operator(g).dense();
        worst_entry = std::max(worst_entry,
                               max_abs_diff(dense, testsupport::dense_operator_oracle(g)));
        for (std::size_t i = 0; i < dense.rows(); ++i)
            for (std::size_t j = 0; j < dense.cols(); ++j)
                worst_asym = std::max(worst_asym, std::abs(dense(i, j) - dense(j, i)));

        // Spectral checks with the preset node weights (U = 1), random W.
        const Hypergraph gp = testsupport::random_hypergraph(rng, 10, 6, true, false);
        const PropagationOperator op = propagation_operator(gp);
        const auto eig = testsupport::symmetric_eigenvalues(op.laplacian_dense());
        worst_eig = std::min(worst_eig, eig.front());

        const DegreeData deg = degrees(gp);
        bool isolated = false;
        for (double dv : deg.d_v) isolated = isolated || dv == 0.0;
        if (!isolated) {
            Matrix v(static_cast<std::size_t>(gp.num_nodes), 1);
            for (int u = 0; u < gp.num_nodes; ++u)
                v(static_cast<std::size_t>(u), 0) =
                    std::sqrt(deg.d_v[static_cast<std::size_t>(u)]);
            worst_fixed = std::max(worst_fixed, max_abs_diff(op.apply(v), v));
        }
    }
    std::ostringstream os;
    os << "entrywise " << worst_entry << ", asymmetry " << worst_asym << ", min eig "
       << worst_eig << ", fixed-point " << worst_fixed;
    detail = os.str();
    return worst_entry < 1e-12 && worst_asym < 1e-12 && worst_eig >= -1e-9 && worst_fixed < 1e-9
               ? Outcome::PASS
               : Outcome::FAIL;
}

Outcome gradient_fidelity(std::string& detail) {
    testsupport::Rng rng(20240);
    const int n = 20, d = 16, p = 4;
    Hypergraph g;
    g.num_nodes = n;
    std::set<std::vector<int>> seen;
    int next_id = 0;
    while (next_id < 7) {
        std::vector<int> members;
        for (int u = 0; u < n; ++u)
            if (rng.uniform() < 0.3) members.push_back(u);
        if (members.size() < 2 || !seen.insert(members).second) continue;
        g.edges.push_back({next_id++, HyperedgeKind::FOR, members});
    }
    g.node_weights.assign(n, 1.0);
    g.edge_weights.assign(g.edges.size(), 1.0);
    const PropagationOperator op = propagation_operator(g);

    FeatureMatrix x(n, d);
    for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
    std::vector<int> labels(n), ids;
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(p));
        ids.push_back(i);
    }

    TrainConfig linear;
    linear.layers = 2;
    linear.hidden_dim = 32;
    linear.seed = 5;
    linear.focal_gamma = 0.0;
    linear.activation = Activation::IDENTITY;
    linear.batch_norm = false;
    const double err_linear = grad_check(op, x, labels, ids, p, linear, 1e-5, 120);

    TrainConfig full;
    full.layers = 2;
    full.hidden_dim = 32;
    full.seed = 6;
    full.focal_gamma = 2.0;
    const double err_full = grad_check(op, x, labels, ids, p, full, 1e-5, 120);

    std::ostringstream os;
    os << "linear " << err_linear << " (< 1e-6), full stack " << err_full << " (< 1e-4)";
    detail = os.str();
    return err_linear < 1e-6 && err_full < 1e-4 ? Outcome::PASS : Outcome::FAIL;
}

Outcome focal_anchors(std::string& detail) {
    testsupport::Rng rng(88);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.uniform_int(8);
        const std::size_t p = 2 + rng.uniform_int(5);
        Matrix probs(m, p);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                probs(i, j) = 0.01 + rng.uniform();
                sum += probs(i, j);
            }
            for (std::size_t j = 0; j < p; ++j) probs(i, j) /= sum;
            labels[i] = static_cast<int>(rng.uniform_int(p));
        }
        double ce = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            ce -= std::log(probs(i, static_cast<std::size_t>(labels[i])));
        ce /= static_cast<double>(m);
        const std::vector<double> w(p, 1.0);
        worst = std::max(worst, std::abs(focal_loss(probs, labels, w, 0.0).loss - ce));
    }

    Matrix half(1, 2, 0.5);
    const double anchor = focal_loss(half, {0}, {1.0, 1.0}, 2.0).loss;
    std::ostringstream os;
    os << "CE gap " << worst << ", anchor " << anchor;
    detail = os.str();
    return worst < 1e-12 && std::abs(anchor - 0.173287) <= 1e-6 ? Outcome::PASS : Outcome::FAIL;
}

Outcome hyperedge_oracles(std::string& detail) {
    testsupport::Rng rng(321);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(10));
        const int k = 1 + static_cast<int>(rng.uniform_int(3));
        std::vector<std::pair<int, int>> pairs;
        std::vector<EdgeRecord> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng.uniform() < 0.25) {
                    pairs.emplace_back(a, b);
                    edges.push_back({a, b, EdgeKind::FOLLOW});
                }
        const auto dist = testsupport::hop_distance_oracle(n, pairs);
        std::set<std::vector<int>> expected;
        for (int v = 0; v < n; ++v) {
            std::vector<int> ball;
            for (int u = 0; u < n; ++u)
                if (dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] <= k)
                    ball.push_back(u);
            if (ball.size() >= 2) expected.insert(ball);
        }
        std::set<std::vector<int>> got;
        for (const auto& e : topology_hyperedges(edges, n, k)) got.insert(e.members);
        if (got != expected) {
            detail = "topology mismatch at trial " + std::to_string(trial);
            return Outcome::FAIL;
        }
    }

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(13));
        const int d = 2 + static_cast<int>(rng.uniform_int(5));
        const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        const Similarity sim = trial % 2 ? Similarity::EUCLIDEAN : Similarity::COSINE;
        FeatureMatrix f(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
        for (auto& v : f.data()) v = rng.uniform(-1.0, 1.0);

        std::set<std::vector<int>> expected;
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<double, int>> scored;
            for (int u = 0; u < n; ++u) {
                if (u == v) continue;
                double s = 0.0;
                if (sim == Similarity::COSINE) {
                    double dot = 0, na = 0, nb = 0;
                    for (int j = 0; j < d; ++j) {
                        const double a = f(static_cast<std::size_t>(v), static_cast<std::size_t>(j));
                        const double b = f(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                        dot += a * b;
                        na += a * a;
                        nb += b * b;
                    }
                    s = dot / (std::sqrt(na) * std::sqrt(nb));
                } else {
                    for (int j = 0; j < d; ++j) {
                        const double diff =
                            f(static_cast<std::size_t>(v), static_cast<std::size_t>(j)) -
                            f(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
                        s -= diff * diff;
                    }
                    s = -std::sqrt(-s);
                }
                scored.emplace_back(s, u);
            }
            std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            std::vector<int> members = {v};
            for (int i = 0; i < k; ++i)
                members.push_back(scored[static_cast<std::size_t>(i)].second);
            std::sort(members.begin(), members.end());
            expected.insert(members);
        }
        std::set<std::vector<int>> got;
        for (const auto& e : semantic_hyperedges(f, k, sim)) got.insert(e.members);
        if (got != expected) {
            detail = "semantic mismatch at trial " + std::to_string(trial);
            return Outcome::FAIL;
        }
    }
    detail = "100 topology + 100 semantic oracle comparisons";
    return Outcome::PASS;
}

Outcome planted_learnability(std::string& detail) {
    HyperedgeSpec spec;
    spec.kinds = {HyperedgeKind::FOR};
    const TrainConfig config;  // the default configuration is the contract
    const EvalReport report = run_experiment(planted().ctx, spec, config, 5);
    std::ostringstream os;
    os << "mean test accuracy " << report.accuracy.mean << " +- " << report.accuracy.stddev
       << " over 5 seeds (chance 0.25)";
    detail = os.str();
    return report.accuracy.mean >= 0.9 ? Outcome::PASS : Outcome::FAIL;
}

Outcome ablation_ordering(std::string& detail) {
    const TrainConfig config;
    const int reps = 3;

    // SEM-only row built from pure-noise features: noise for both the KNN
    // construction and the model input.
    testsupport::Rng rng(515);
    FeatureMatrix noise(planted().features.rows(), planted().features.cols());
    for (auto& v : noise.data()) v = rng.normal();
    ExperimentContext noise_ctx = planted().ctx;
    noise_ctx.enhanced = &noise;
    HyperedgeSpec sem;
    sem.kinds = {HyperedgeKind::SEM};
    const double sem_acc = run_experiment(noise_ctx, sem, config, reps).accuracy.mean;

    const std::vector<std::set<HyperedgeKind>> with_for = {
        {HyperedgeKind::FOR},
        {HyperedgeKind::TOP, HyperedgeKind::FOR},
        {HyperedgeKind::SEM, HyperedgeKind::FOR},
        {HyperedgeKind::TOP, HyperedgeKind::SEM, HyperedgeKind::FOR},
    };
    std::ostringstream os;
    os << "SEM(noise) " << sem_acc;
    bool ok = true;
    for (const auto& kinds : with_for) {
        HyperedgeSpec spec;
        spec.kinds = kinds;
        const double acc = run_experiment(planted().ctx, spec, config, reps).accuracy.mean;
        std::string name;
        for (auto k : kinds) name += (name.empty() ? "" : "+") + kind_name(k);
        os << ", " << name << " " << acc;
        ok = ok && acc >= sem_acc + 0.3;
    }
    detail = os.str();
    return ok ? Outcome::PASS : Outcome::FAIL;
}

Outcome label_ratio_monotonicity(std::string& detail) {
    HyperedgeSpec spec;
    spec.kinds = {HyperedgeKind::FOR};
    const TrainConfig config;
    const auto rows = label_ratio_sweep(planted().ctx, spec, config, {0.1, 1.0}, 5);
    std::ostringstream os;
    os << "accuracy at f=0.1: " << rows[0].report.accuracy.mean
       << ", f=1.0: " << rows[1].report.accuracy.mean;
    detail = os.str();
    return rows[1].report.accuracy.mean >= rows[0].report.accuracy.mean ? Outcome::PASS
                                                                        : Outcome::FAIL;
}

Outcome metrics_oracle(std::string& detail) {
    testsupport::Rng rng(606);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t m = 2 + rng.uniform_int(7);
        const std::size_t p = 2 + rng.uniform_int(2);
        Matrix probs(m, p);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                probs(i, j) = 0.2 * static_cast<double>(1 + rng.uniform_int(5));
                sum += probs(i, j);
            }
            for (std::size_t j = 0; j < p; ++j) probs(i, j) /= sum;
            labels[i] = static_cast<int>(rng.uniform_int(p));
        }
        bool varied = false;
        for (std::size_t i = 1; i < m; ++i) varied = varied || labels[i] != labels[0];
        if (!varied) labels[0] = (labels[0] + 1) % static_cast<int>(p);

        const MetricReport r = metrics(probs, labels);

        int correct = 0;
        double auc_sum = 0.0;
        int auc_classes = 0;
        for (std::size_t i = 0; i < m; ++i) {
            int best = 0;
            for (std::size_t j = 1; j < p; ++j)
                if (probs(i, j) > probs(i, static_cast<std::size_t>(best)))
                    best = static_cast<int>(j);
            correct += best == labels[i];
        }
        for (std::size_t c = 0; c < p; ++c) {
            std::vector<double> scores(m);
            std::vector<int> pos(m);
            int n_pos = 0;
            for (std::size_t i = 0; i < m; ++i) {
                scores[i] = probs(i, c);
                pos[i] = labels[i] == static_cast<int>(c);
                n_pos += pos[i];
            }
            if (n_pos == 0 || n_pos == static_cast<int>(m)) continue;
            auc_sum += testsupport::pairwise_auc(scores, pos);
            ++auc_classes;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(m);
        const double auc = auc_classes ? auc_sum / auc_classes : 0.5;
        if (std::abs(r.accuracy - acc) > 1e-12 || std::abs(r.auc - auc) > 1e-12 ||
            std::abs(r.micro_f1 - acc) > 1e-12) {
            detail = "mismatch at trial " + std::to_string(trial);
            return Outcome::FAIL;
        }
    }

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng.uniform_int(15);
        const std::size_t p = 2 + rng.uniform_int(8);
        Matrix probs(m, p);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                probs(i, j) = rng.uniform() + 1e-6;
                sum += probs(i, j);
            }
            for (std::size_t j = 0; j < p; ++j) probs(i, j) /= sum;
            labels[i] = static_cast<int>(rng.uniform_int(p));
        }
        const MetricReport r = metrics(probs, labels);
        if (std::abs(r.micro_f1 - r.accuracy) > 1e-12) {
            detail = "micro-F1 != accuracy at trial " + std::to_string(trial);
            return Outcome::FAIL;
        }
    }
    detail = "400 enumerated oracle sets + 1000 identity checks";
    return Outcome::PASS;
}

Outcome powerlaw_recovery(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (double alpha : {2.0, 2.5, 3.0}) {
        const auto sample = sample_discrete_powerlaw(alpha, 1, 10000, 42);
        const PowerlawFit fit = powerlaw_fit(sample);
        os << "alpha " << alpha << " -> " << fit.alpha << " (xmin " << fit.xmin << "); ";
        ok = ok && std::abs(fit.alpha - alpha) <= 0.1;
    }
    detail = os.str();
    return ok ? Outcome::PASS : Outcome::FAIL;
}

Outcome offline_end_to_end(std::string& detail) {
    if (g_binary.empty()) {
        detail = "no CLI binary path given";
        return Outcome::FAIL;
    }
    const auto dir = testsupport::scratch_dir("acceptance_e2e");
    const auto data = dir / "data";
    fs::create_directories(data);
    if (run_cmd("fixture --out " + data.string() + " --seed 9") != 0) {
        detail = "fixture generation failed";
        return Outcome::FAIL;
    }

    auto make_config = [&](const fs::path& out) {
        nlohmann::json config = {
            {"dataset",
             {{"users", (data / "users.jsonl").string()},
              {"edges", (data / "edges.csv").string()}}},
            {"out_dir", out.string()},
            {"seed", 3},
            {"scheme", "mbti"},
            {"hyperedges", {{"kinds", {"TOP", "SEM", "FOR"}}, {"knn_k", 10}}},
            {"features", {{"source", "enhanced"}}},
            {"embedder", {{"kind", "hash"}, {"dim", 128}}},
            {"train", {{"max_epochs", 500}, {"patience", 60}}},
            {"eval", {{"n_reps", 2}}},
        };
        const auto path = dir / (out.filename().string() + "_config.json");
        std::ofstream(path) << config.dump(2);
        return path;
    };

    const std::vector<std::string> steps = {"ingest", "enhance", "embed", "build",
                                            "train",  "eval",    "stats"};
    for (const auto& run : {std::string("run1"), std::string("run2")}) {
        const auto out = dir / run;
        const auto config = make_config(out);
        for (const auto& step : steps)
            if (run_cmd(step + " --config " + config.string() + " --offline") != 0) {
                detail = step + " failed in " + run;
                return Outcome::FAIL;
            }
    }

    // Two runs over the same inputs must be byte-identical. The config files
    // differ only in out_dir, which feeds the config hash, so compare the
    // content after normalizing the hash lines away for text reports and
    // compare checkpoints modulo the embedded header hash.
    const std::vector<std::string> reports = {"profiles.jsonl", "embeddings.bin", "hypergraph.tsv",
                                              "weights.tsv",    "checkpoint.bin", "history.csv",
                                              "eval.json",      "stats.json",     "validation.json",
                                              "distribution.csv"};
    for (const auto& name : reports) {
        std::string a = slurp(dir / "run1" / name);
        std::string b = slurp(dir / "run2" / name);
        if (a.empty() && b.empty()) {
            detail = name + " missing in both runs";
            return Outcome::FAIL;
        }
        auto scrub = [](std::string s) {
            // out_dir differs between the two runs, so the embedded config
            // hashes differ; blank them before comparing.
            for (std::string needle : {std::string("0x")}) {
                std::size_t pos = 0;
                while ((pos = s.find(needle, pos)) != std::string::npos) {
                    std::size_t end = pos + 2;
                    while (end < s.size() && std::isxdigit(static_cast<unsigned char>(s[end])))
                        ++end;
                    s.replace(pos, end - pos, "0xH");
                    pos += 3;
                }
            }
            return s;
        };
        if (name.ends_with(".bin")) {
            // binary headers: magic(8) + config_hash(8) + seed(8); compare past the hash
            if (a.size() != b.size() || a.substr(16) != b.substr(16) ||
                a.substr(0, 8) != b.substr(0, 8)) {
                detail = name + " differs between runs";
                return Outcome::FAIL;
            }
        } else if (scrub(a) != scrub(b)) {
            detail = name + " differs between runs";
            return Outcome::FAIL;
        }
    }
    detail = "two full offline runs byte-identical across " + std::to_string(reports.size()) +
             " artifacts";
    return Outcome::PASS;
}

Outcome released_dataset(std::string& detail) {
    const char* users_env = std::getenv("HYPERSONA_REAL_USERS");
    const char* edges_env = std::getenv("HYPERSONA_REAL_EDGES");
    fs::path users = users_env ? fs::path(users_env) : fs::path("data/real/users.jsonl");
    fs::path edges = edges_env ? fs::path(edges_env) : fs::path("data/real/edges.csv");
    if (!fs::exists(users) || !fs::exists(edges)) {
        detail = "released dataset not present (set HYPERSONA_REAL_USERS/EDGES); best-effort";
        return Outcome::SKIP;
    }

    const DatasetBundle bundle = load_dataset(users.string(), edges.string());
    const auto dist = distribution(bundle.users, LabelScheme::MBTI16);
    const std::vector<std::pair<std::string, double>> anchors = {{"INFP", 0.1185},
                                                                 {"INFJ", 0.0993},
                                                                 {"INTP", 0.0754},
                                                                 {"ESTJ", 0.0314},
                                                                 {"ESFJ", 0.0354}};
    std::ostringstream os;
    bool ok = true;
    for (const auto& [label, expected] : anchors) {
        double got = -1.0;
        for (const auto& e : dist)
            if (e.label == label) got = e.proportion;
        os << label << " " << got * 100 << "% (paper " << expected * 100 << "%); ";
        ok = ok && std::abs(got - expected) <= 0.005;
    }

    // RAW-feature pipeline runs to completion; headline numbers reported,
    // not gated.
    ExperimentContext ctx;
    ctx.bundle = &bundle;
    ctx.source = FeatureSource::RAW;
    ctx.scheme = LabelScheme::MBTI16;
    HyperedgeSpec spec;
    TrainConfig config;
    const EvalReport report = run_experiment(ctx, spec, config, 1);
    os << "RAW accuracy " << report.accuracy.mean << " (paper 0.8538, not gated)";
    detail = os.str();
    return ok ? Outcome::PASS : Outcome::FAIL;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_binary = argv[1];

    const std::vector<Criterion> criteria = {
        {1, "operator correctness vs dense oracle", operator_correctness},
        {2, "gradient fidelity vs finite differences", gradient_fidelity},
        {3, "focal-loss anchors", focal_anchors},
        {4, "hyperedge construction oracles", hyperedge_oracles},
        {5, "planted-signal learnability", planted_learnability},
        {6, "ablation ordering on the planted fixture", ablation_ordering},
        {7, "label-ratio monotonicity", label_ratio_monotonicity},
        {8, "metrics oracle", metrics_oracle},
        {9, "power-law exponent recovery", powerlaw_recovery},
        {10, "offline end-to-end determinism", offline_end_to_end},
        {11, "released-dataset anchors (best effort)", released_dataset},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        Outcome outcome;
        try {
            outcome = criterion.run(detail);
        } catch (const std::exception& e) {
            outcome = Outcome::FAIL;
            detail = std::string("exception: ") + e.what();
        }
        const auto seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = outcome == Outcome::PASS ? "PASS"
                          : outcome == Outcome::SKIP ? "SKIP"
                                                     : "FAIL";
        std::printf("[%s] criterion %2d: %s (%.1fs) - %s\n", tag, criterion.id,
                    criterion.name.c_str(), seconds, detail.c_str());
        std::fflush(stdout);
        if (outcome == Outcome::FAIL) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
