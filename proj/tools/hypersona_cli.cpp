// hypersona: build social-environment hypergraphs from fragmented user
// records, enhance profiles through a language-model client, train the
// skip-connected hypergraph network, and run the evaluation grids.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypersona/enhance.hpp"
#include "hypersona/envgen.hpp"
#include "hypersona/eval.hpp"
#include "hypersona/fixture.hpp"
#include "hypersona/hgnn.hpp"
#include "hypersona/ingest.hpp"
#include "hypersona/io.hpp"
#include "hypersona/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hypersona;

namespace {

struct RunConfig {
    std::string users_path;
    std::string edges_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::string scheme = "mbti";  // mbti | enneagram
    bool offline = false;

    std::vector<std::string> kinds = {"TOP", "SEM", "FOR"};
    int k_hop = 2;
    int knn_k = 10;
    std::string similarity = "cosine";

    std::string feature_source = "enhanced";  // enhanced | raw

    std::string embedder_kind = "hash";  // hash | external
    int embed_dim = 384;
    std::string embed_endpoint;
    std::string embed_model = "sentence-embedder";
    std::string embed_api_key_env = "EMBED_API_KEY";

    std::string llm_base_url;
    std::string llm_model = "gpt-3.5-turbo";
    std::string llm_api_key_env = "LLM_API_KEY";
    double llm_temperature = 0.0;
    int llm_max_retries = 3;
    int llm_backoff_ms = 100;
    int llm_max_inflight = 4;

    TrainConfig train;

    int n_reps = 5;
    std::array<double, 3> ratios = {0.8, 0.1, 0.1};
    std::vector<double> sweep_fractions = {0.1, 0.25, 0.5, 0.75, 1.0};

    json to_json() const {
        json j;
        j["dataset"] = {{"users", users_path}, {"edges", edges_path}};
        j["out_dir"] = out_dir;
        j["seed"] = seed;
        j["scheme"] = scheme;
        j["offline"] = offline;
        j["hyperedges"] = {{"kinds", kinds},
                           {"k_hop", k_hop},
                           {"knn_k", knn_k},
                           {"similarity", similarity}};
        j["features"] = {{"source", feature_source}};
        j["embedder"] = {{"kind", embedder_kind},
                         {"dim", embed_dim},
                         {"endpoint", embed_endpoint},
                         {"model", embed_model},
                         {"api_key_env", embed_api_key_env}};
        j["llm"] = {{"base_url", llm_base_url},
                    {"model", llm_model},
                    {"api_key_env", llm_api_key_env},
                    {"temperature", llm_temperature},
                    {"max_retries", llm_max_retries},
                    {"backoff_ms", llm_backoff_ms},
                    {"max_inflight", llm_max_inflight}};
        j["train"] = {{"learning_rate", train.learning_rate},
                      {"weight_decay", train.weight_decay},
                      {"max_epochs", train.max_epochs},
                      {"layers", train.layers},
                      {"hidden_dim", train.hidden_dim},
                      {"focal_gamma", train.focal_gamma},
                      {"bn_momentum", train.bn_momentum},
                      {"patience", train.patience},
                      {"class_weighting", train.class_weighting}};
        j["eval"] = {{"n_reps", n_reps}, {"ratios", ratios}};
        j["sweep"] = {{"fractions", sweep_fractions}};
        return j;
    }

    void apply_json(const json& j) {
        if (j.contains("dataset")) {
            users_path = j["dataset"].value("users", users_path);
            edges_path = j["dataset"].value("edges", edges_path);
        }
        out_dir = j.value("out_dir", out_dir);
        seed = j.value("seed", seed);
        scheme = j.value("scheme", scheme);
        offline = j.value("offline", offline);
        if (j.contains("hyperedges")) {
            const auto& h = j["hyperedges"];
            if (h.contains("kinds")) kinds = h["kinds"].get<std::vector<std::string>>();
            k_hop = h.value("k_hop", k_hop);
            knn_k = h.value("knn_k", knn_k);
            similarity = h.value("similarity", similarity);
        }
        if (j.contains("features")) feature_source = j["features"].value("source", feature_source);
        if (j.contains("embedder")) {
            const auto& e = j["embedder"];
            embedder_kind = e.value("kind", embedder_kind);
            embed_dim = e.value("dim", embed_dim);
            embed_endpoint = e.value("endpoint", embed_endpoint);
            embed_model = e.value("model", embed_model);
            embed_api_key_env = e.value("api_key_env", embed_api_key_env);
        }
        if (j.contains("llm")) {
            const auto& l = j["llm"];
            llm_base_url = l.value("base_url", llm_base_url);
            llm_model = l.value("model", llm_model);
            llm_api_key_env = l.value("api_key_env", llm_api_key_env);
            llm_temperature = l.value("temperature", llm_temperature);
            llm_max_retries = l.value("max_retries", llm_max_retries);
            llm_backoff_ms = l.value("backoff_ms", llm_backoff_ms);
            llm_max_inflight = l.value("max_inflight", llm_max_inflight);
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            train.learning_rate = t.value("learning_rate", train.learning_rate);
            train.weight_decay = t.value("weight_decay", train.weight_decay);
            train.max_epochs = t.value("max_epochs", train.max_epochs);
            train.layers = t.value("layers", train.layers);
            train.hidden_dim = t.value("hidden_dim", train.hidden_dim);
            train.focal_gamma = t.value("focal_gamma", train.focal_gamma);
            train.bn_momentum = t.value("bn_momentum", train.bn_momentum);
            train.patience = t.value("patience", train.patience);
            train.class_weighting = t.value("class_weighting", train.class_weighting);
        }
        if (j.contains("eval")) {
            n_reps = j["eval"].value("n_reps", n_reps);
            if (j["eval"].contains("ratios")) {
                const auto r = j["eval"]["ratios"].get<std::vector<double>>();
                if (r.size() != 3) throw InvalidArgument("config: eval.ratios needs 3 entries");
                ratios = {r[0], r[1], r[2]};
            }
        }
        if (j.contains("sweep") && j["sweep"].contains("fractions"))
            sweep_fractions = j["sweep"]["fractions"].get<std::vector<double>>();
    }

    LabelScheme label_scheme() const {
        if (scheme == "mbti") return LabelScheme::MBTI16;
        if (scheme == "enneagram") return LabelScheme::ENNEAGRAM9;
        throw InvalidArgument("config: scheme must be `mbti` or `enneagram`");
    }

    HyperedgeSpec hyperedge_spec() const {
        HyperedgeSpec spec;
        spec.kinds.clear();
        for (const auto& k : kinds) spec.kinds.insert(kind_from_name(k));
        spec.k_hop = k_hop;
        spec.knn_k = knn_k;
        spec.similarity = similarity_from_name(similarity);
        return spec;
    }

    FeatureSource source() const { return feature_source_from_name(feature_source); }

    std::uint64_t config_hash() const { return fnv1a64(to_json().dump()); }

    Provenance provenance() const { return Provenance{config_hash(), seed}; }

    fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json provenance_json(const Provenance& prov) {
    return {{"config_hash", hex64(prov.config_hash)}, {"seed", prov.seed},
            {"version", prov.version}};
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

void require_artifact(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path))
        throw Error("missing " + path.string() + "; run `hypersona " + producer + "` first");
}

DatasetBundle load_bundle(const RunConfig& config) {
    if (config.users_path.empty() || config.edges_path.empty())
        throw InvalidArgument("config: dataset.users and dataset.edges must be set");
    return load_dataset(config.users_path, config.edges_path);
}

FeatureMatrix load_features(const RunConfig& config, const DatasetBundle& bundle) {
    if (config.source() == FeatureSource::RAW) return raw_feature_matrix(bundle);
    require_artifact(config.out("embeddings.bin"), "embed");
    return read_embeddings(config.out("embeddings.bin").string());
}

json metric_report_json(const MetricReport& r) {
    return {{"accuracy", r.accuracy},   {"auc", r.auc},
            {"macro_f1", r.macro_f1},   {"micro_f1", r.micro_f1},
            {"precision", r.precision}, {"recall", r.recall},
            {"confusion", r.confusion}, {"num_samples", r.num_samples}};
}

json eval_report_json(const EvalReport& r) {
    json reps = json::array();
    for (const auto& rep : r.repetitions) reps.push_back(metric_report_json(rep));
    return {{"accuracy", {{"mean", r.accuracy.mean}, {"std", r.accuracy.stddev}}},
            {"auc", {{"mean", r.auc.mean}, {"std", r.auc.stddev}}},
            {"macro_f1", {{"mean", r.macro_f1.mean}, {"std", r.macro_f1.stddev}}},
            {"micro_f1", {{"mean", r.micro_f1.mean}, {"std", r.micro_f1.stddev}}},
            {"confusion", r.confusion},
            {"repetitions", reps}};
}

void write_eval_csv(const fs::path& path, const std::string& key_name,
                    const std::vector<std::pair<std::string, EvalReport>>& rows,
                    const Provenance& prov) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << provenance_comment(prov) << "\n";
    out << key_name
        << ",accuracy_mean,accuracy_std,auc_mean,auc_std,macro_f1_mean,macro_f1_std,"
           "micro_f1_mean,micro_f1_std\n";
    for (const auto& [key, report] : rows)
        out << key << "," << d2s(report.accuracy.mean) << "," << d2s(report.accuracy.stddev) << ","
            << d2s(report.auc.mean) << "," << d2s(report.auc.stddev) << ","
            << d2s(report.macro_f1.mean) << "," << d2s(report.macro_f1.stddev) << ","
            << d2s(report.micro_f1.mean) << "," << d2s(report.micro_f1.stddev) << "\n";
}

ExperimentContext make_context(const RunConfig& config, const DatasetBundle& bundle,
                               const FeatureMatrix* enhanced) {
    ExperimentContext ctx;
    ctx.bundle = &bundle;
    ctx.source = config.source();
    ctx.enhanced = enhanced;
    ctx.scheme = config.label_scheme();
    ctx.ratios = config.ratios;
    return ctx;
}

// ---- subcommands ----

int cmd_ingest(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    const ValidationReport report = validate(bundle);
    json j;
    j["provenance"] = provenance_json(config.provenance());
    j["num_users"] = report.num_users;
    j["num_edges"] = report.num_edges;
    j["num_groups"] = report.num_groups;
    j["missing_attribute_counts"] = report.missing_attribute_counts;
    j["label_coverage"] = {{"mbti", report.mbti_coverage},
                           {"enneagram", report.enneagram_coverage}};
    j["isolated_nodes"] = report.isolated_nodes;
    j["empty_groups"] = report.empty_groups;
    j["warnings"] = report.warnings;
    write_json_file(config.out("validation.json"), j);
    std::cout << "ingested " << report.num_users << " users, " << report.num_edges << " edges, "
              << report.num_groups << " groups (" << report.warnings.size() << " warnings)\n";
    return 0;
}

int cmd_enhance(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    const DatasetBundle stripped = strip_labels(bundle);

    std::vector<PromptBundle> prompts;
    std::vector<int> ids;
    for (const auto& user : stripped.users) {
        prompts.push_back(build_prompt(user));
        ids.push_back(user.user_id);
    }

    std::unique_ptr<LlmClient> client;
    if (config.offline) {
        client = std::make_unique<MockLlmClient>();
    } else {
        if (config.llm_base_url.empty())
            throw InvalidArgument(
                "config: llm.base_url is empty; set it or pass --offline for the mock client");
        HttpLlmConfig http;
        http.base_url = config.llm_base_url;
        http.model = config.llm_model;
        http.api_key_env = config.llm_api_key_env;
        client = std::make_unique<HttpLlmClient>(std::move(http));
    }

    EnhanceCache cache;
    if (fs::exists(config.out("profiles.jsonl")))
        cache.warm_from_profiles(read_profiles(config.out("profiles.jsonl").string()));

    EnhanceOptions options;
    options.temperature = config.llm_temperature;
    options.max_retries = config.llm_max_retries;
    options.backoff_ms = config.llm_backoff_ms;
    options.max_inflight = config.llm_max_inflight;
    if (config.offline) options.fixed_timestamp = 0;

    const auto profiles = enhance_profiles(*client, prompts, ids, options, &cache);
    write_profiles(config.out("profiles.jsonl").string(), profiles, config.provenance());

    int fallbacks = 0;
    for (const auto& p : profiles) fallbacks += p.fallback ? 1 : 0;
    std::cout << "enhanced " << profiles.size() << " profiles with " << client->model_id() << " ("
              << fallbacks << " fallbacks)\n";
    return 0;
}

int cmd_embed(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    require_artifact(config.out("profiles.jsonl"), "enhance");
    const auto profiles = read_profiles(config.out("profiles.jsonl").string());

    std::vector<std::string> narratives(bundle.users.size());
    for (const auto& p : profiles)
        if (p.user_id >= 0 && static_cast<std::size_t>(p.user_id) < narratives.size())
            narratives[static_cast<std::size_t>(p.user_id)] = p.narrative;

    EmbedderSpec spec;
    spec.kind = config.offline || config.embedder_kind == "hash" ? EmbedderKind::HASH
                                                                 : EmbedderKind::EXTERNAL;
    spec.dim = config.embed_dim;
    spec.endpoint = config.embed_endpoint;
    spec.model = config.embed_model;
    spec.api_key_env = config.embed_api_key_env;

    std::vector<std::string> warnings;
    const FeatureMatrix features = embed(spec, narratives, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    write_embeddings(config.out("embeddings.bin").string(), config.out("embeddings.txt").string(),
                     features, config.provenance());
    std::cout << "embedded " << features.rows() << " narratives into dimension " << features.cols()
              << "\n";
    return 0;
}

int cmd_build(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    const HyperedgeSpec spec = config.hyperedge_spec();

    FeatureMatrix features;
    const FeatureMatrix* features_ptr = nullptr;
    if (spec.kinds.count(HyperedgeKind::SEM)) {
        features = load_features(config, bundle);
        features_ptr = &features;
    }
    std::vector<std::string> warnings;
    const Hypergraph graph = assemble(spec, bundle, features_ptr, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    write_hypergraph(config.out("hypergraph.tsv").string(), config.out("weights.tsv").string(),
                     graph, config.provenance());

    std::map<std::string, int> per_kind;
    for (const auto& e : graph.edges) per_kind[kind_name(e.kind)] += 1;
    std::cout << "built hypergraph: " << graph.num_nodes << " nodes, " << graph.edges.size()
              << " hyperedges (";
    bool first = true;
    for (const auto& [k, c] : per_kind) {
        std::cout << (first ? "" : ", ") << k << "=" << c;
        first = false;
    }
    std::cout << ")\n";
    return 0;
}

int cmd_train(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    require_artifact(config.out("hypergraph.tsv"), "build");
    const Hypergraph graph = read_hypergraph(config.out("hypergraph.tsv").string(),
                                             config.out("weights.tsv").string());
    const FeatureMatrix features = load_features(config, bundle);
    const PropagationOperator op = propagation_operator(graph);

    const auto [labeled_ids, labels] = labeled_nodes(bundle, config.label_scheme());
    if (labeled_ids.empty()) throw Error("no labeled users for scheme " + config.scheme);
    const SplitAssignment assignment = split(labeled_ids, config.ratios, config.seed);

    TrainConfig train_config = config.train;
    train_config.seed = config.seed;
    const TrainResult result = train(op, features, labels, num_classes(config.label_scheme()),
                                     assignment.train, assignment.val, train_config);

    write_checkpoint(config.out("checkpoint.bin").string(), result.params, config.provenance());
    write_history(config.out("history.csv").string(), result.history, config.provenance());
    std::cout << "trained " << result.history.size() << " epochs; best val accuracy "
              << result.best_val_accuracy << " at epoch " << result.best_epoch << "\n";
    return 0;
}

int cmd_eval(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    require_artifact(config.out("checkpoint.bin"), "train");
    require_artifact(config.out("hypergraph.tsv"), "build");

    auto [params, ckpt_prov] = read_checkpoint(config.out("checkpoint.bin").string());
    const Hypergraph graph = read_hypergraph(config.out("hypergraph.tsv").string(),
                                             config.out("weights.tsv").string());
    const FeatureMatrix features = load_features(config, bundle);
    const PropagationOperator op = propagation_operator(graph);

    const auto [labeled_ids, labels] = labeled_nodes(bundle, config.label_scheme());
    const SplitAssignment assignment = split(labeled_ids, config.ratios, ckpt_prov.seed);

    TrainConfig eval_config = config.train;
    const Matrix probs = forward(op, features, params, eval_config, /*training=*/false);
    Matrix test_probs(assignment.test.size(), probs.cols());
    std::vector<int> test_labels(assignment.test.size());
    for (std::size_t r = 0; r < assignment.test.size(); ++r) {
        const auto id = static_cast<std::size_t>(assignment.test[r]);
        for (std::size_t j = 0; j < probs.cols(); ++j) test_probs(r, j) = probs(id, j);
        test_labels[r] = labels[id];
    }
    const MetricReport checkpoint_metrics = metrics(test_probs, test_labels);

    json j;
    j["provenance"] = provenance_json(config.provenance());
    j["scheme"] = config.scheme;
    j["feature_source"] = config.feature_source;
    j["checkpoint"] = metric_report_json(checkpoint_metrics);
    j["checkpoint"]["seed"] = ckpt_prov.seed;

    std::vector<std::pair<std::string, EvalReport>> csv_rows;
    if (config.n_reps > 1) {
        FeatureMatrix enhanced;
        const FeatureMatrix* enhanced_ptr = nullptr;
        if (config.source() == FeatureSource::ENHANCED) {
            enhanced = features;
            enhanced_ptr = &enhanced;
        }
        TrainConfig train_config = config.train;
        train_config.seed = config.seed;
        const EvalReport protocol = run_experiment(make_context(config, bundle, enhanced_ptr),
                                                   config.hyperedge_spec(), train_config,
                                                   config.n_reps);
        j["repetitions"] = eval_report_json(protocol);
        j["repetitions"]["n_reps"] = config.n_reps;
        csv_rows.emplace_back("protocol", protocol);
    }
    write_json_file(config.out("eval.json"), j);

    EvalReport single = aggregate({checkpoint_metrics});
    csv_rows.emplace_back("checkpoint", single);
    write_eval_csv(config.out("eval.csv"), "run", csv_rows, config.provenance());

    std::cout << "checkpoint test accuracy " << checkpoint_metrics.accuracy << ", auc "
              << checkpoint_metrics.auc << ", macro F1 " << checkpoint_metrics.macro_f1
              << ", micro F1 " << checkpoint_metrics.micro_f1 << "\n";
    return 0;
}

int cmd_ablate(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    FeatureMatrix enhanced;
    const FeatureMatrix* enhanced_ptr = nullptr;
    if (config.source() == FeatureSource::ENHANCED) {
        enhanced = load_features(config, bundle);
        enhanced_ptr = &enhanced;
    }
    TrainConfig train_config = config.train;
    train_config.seed = config.seed;
    const auto rows = ablate_hyperedges(make_context(config, bundle, enhanced_ptr),
                                        config.hyperedge_spec(), train_config, config.n_reps);

    json j;
    j["provenance"] = provenance_json(config.provenance());
    j["rows"] = json::array();
    std::vector<std::pair<std::string, EvalReport>> csv_rows;
    for (const auto& row : rows) {
        json r = eval_report_json(row.report);
        r["kinds"] = row.kinds;
        j["rows"].push_back(std::move(r));
        csv_rows.emplace_back(row.kinds, row.report);
        std::cout << row.kinds << ": accuracy " << row.report.accuracy.mean << " +- "
                  << row.report.accuracy.stddev << "\n";
    }
    write_json_file(config.out("ablation.json"), j);
    write_eval_csv(config.out("ablation.csv"), "kinds", csv_rows, config.provenance());
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    FeatureMatrix enhanced;
    const FeatureMatrix* enhanced_ptr = nullptr;
    if (config.source() == FeatureSource::ENHANCED) {
        enhanced = load_features(config, bundle);
        enhanced_ptr = &enhanced;
    }
    TrainConfig train_config = config.train;
    train_config.seed = config.seed;
    const auto rows = label_ratio_sweep(make_context(config, bundle, enhanced_ptr),
                                        config.hyperedge_spec(), train_config,
                                        config.sweep_fractions, config.n_reps);

    json j;
    j["provenance"] = provenance_json(config.provenance());
    j["rows"] = json::array();
    std::vector<std::pair<std::string, EvalReport>> csv_rows;
    for (const auto& row : rows) {
        json r = eval_report_json(row.report);
        r["fraction"] = row.fraction;
        j["rows"].push_back(std::move(r));
        csv_rows.emplace_back(d2s(row.fraction), row.report);
        std::cout << "fraction " << row.fraction << ": accuracy " << row.report.accuracy.mean
                  << " +- " << row.report.accuracy.stddev << "\n";
    }
    write_json_file(config.out("sweep.json"), j);
    write_eval_csv(config.out("sweep.csv"), "fraction", csv_rows, config.provenance());
    return 0;
}

int cmd_stats(const RunConfig& config) {
    const DatasetBundle bundle = load_bundle(config);
    json j;
    j["provenance"] = provenance_json(config.provenance());

    const auto dist = distribution(bundle.users, config.label_scheme());
    {
        json d = json::array();
        std::ofstream csv(config.out("distribution.csv"));
        csv << provenance_comment(config.provenance()) << "\n";
        csv << "type,count,proportion\n";
        for (const auto& e : dist) {
            d.push_back({{"type", e.label}, {"count", e.count}, {"proportion", e.proportion}});
            csv << e.label << "," << e.count << "," << d2s(e.proportion) << "\n";
        }
        j["distribution"] = {{"scheme", config.scheme}, {"entries", std::move(d)}};
    }

    const std::vector<std::pair<std::string, std::string>> crosstab_axes = {
        {"mbti", "enneagram"}, {"mbti", "gender"}, {"mbti_mid2", "follower_quartile"}};
    j["crosstabs"] = json::array();
    for (const auto& [a, b] : crosstab_axes) {
        const Crosstab tab = crosstab(bundle.users, a, b);
        j["crosstabs"].push_back({{"row_axis", tab.row_axis},
                                  {"col_axis", tab.col_axis},
                                  {"row_labels", tab.row_labels},
                                  {"col_labels", tab.col_labels},
                                  {"counts", tab.counts},
                                  {"excluded", tab.excluded}});
    }

    const auto fit_field = [&](const std::string& name, const std::vector<std::int64_t>& values) {
        json out;
        out["field"] = name;
        // log-log-ready plot data: value,count
        std::map<std::int64_t, int> hist;
        for (auto v : values)
            if (v >= 1) hist[v] += 1;
        std::ofstream csv(config.out("powerlaw_" + name + ".csv"));
        csv << provenance_comment(config.provenance()) << "\n";
        csv << "value,count\n";
        for (const auto& [v, c] : hist) csv << v << "," << c << "\n";
        std::vector<std::int64_t> positive;
        for (auto v : values)
            if (v >= 1) positive.push_back(v);
        try {
            const PowerlawFit fit = powerlaw_fit(positive);
            out["alpha"] = fit.alpha;
            out["xmin"] = fit.xmin;
            out["n_tail"] = fit.n_tail;
            out["ks"] = fit.ks;
        } catch (const std::exception& e) {
            out["error"] = e.what();
        }
        return out;
    };

    std::vector<std::int64_t> followers;
    for (const auto& u : bundle.users)
        if (u.follower_count) followers.push_back(*u.follower_count);
    std::vector<std::int64_t> group_sizes;
    for (const auto& [name, members] : bundle.group_index)
        group_sizes.push_back(static_cast<std::int64_t>(members.size()));
    j["powerlaw"] = json::array({fit_field("followers", followers),
                                 fit_field("group_size", group_sizes)});

    write_json_file(config.out("stats.json"), j);
    std::cout << "stats written for " << bundle.num_users() << " users\n";
    return 0;
}

int cmd_gradcheck(const RunConfig& config) {
    // Deterministic 20-node fixture; independent of any dataset.
    Rng rng(config.seed + 1);
    const int n = 20, d = 16, p = 4;
    Hypergraph g;
    g.num_nodes = n;
    std::set<std::vector<int>> seen;
    int next_id = 0;
    while (next_id < 8) {
        std::vector<int> members;
        for (int u = 0; u < n; ++u)
            if (rng.uniform() < 0.3) members.push_back(u);
        if (members.size() < 2 || !seen.insert(members).second) continue;
        g.edges.push_back({next_id++, HyperedgeKind::FOR, members});
    }
    g.node_weights.assign(n, 1.0);
    g.edge_weights.assign(g.edges.size(), 1.0);

    FeatureMatrix x(n, d);
    for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
    std::vector<int> labels(n), labeled_ids;
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(p));
        labeled_ids.push_back(i);
    }

    TrainConfig check_config = config.train;
    check_config.seed = config.seed;
    const double err = grad_check(propagation_operator(g), x, labels, labeled_ids, p,
                                  check_config, 1e-5, 120);
    std::cout << "max relative gradient error: " << err << " (threshold 1e-4)\n";
    return err > 1e-4 ? 1 : 0;
}

int cmd_fixture(const RunConfig& config) {
    FixtureConfig fc;
    fc.seed = config.seed;
    const DatasetBundle bundle = make_planted_bundle(fc);
    fs::create_directories(config.out_dir);
    write_fixture_files(bundle, config.out("users.jsonl").string(),
                        config.out("edges.csv").string());
    std::cout << "fixture written: " << bundle.num_users() << " users, " << bundle.edges.size()
              << " edges, " << bundle.group_index.size() << " groups\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypersona: social-environment hypergraph personality analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    bool offline = false;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed_override, "override the run seed");
    app.add_option("--out", out_override, "override the output directory");
    app.add_flag("--offline", offline, "force the mock LLM client and the hash embedder");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ingest", "load and validate the dataset, write validation.json"},
        {"enhance", "generate enhanced narratives through the LLM client"},
        {"embed", "embed narratives into the node feature matrix"},
        {"build", "assemble the social-environment hypergraph"},
        {"train", "train the hypergraph network, write checkpoint + history"},
        {"eval", "evaluate the checkpoint (and the repetition protocol)"},
        {"ablate", "run the 7-row hyperedge-subset ablation"},
        {"sweep", "run the label-ratio sweep"},
        {"stats", "label distributions, crosstabs and power-law fits"},
        {"gradcheck", "finite-difference check of the analytic gradients"},
        {"fixture", "generate the bundled synthetic planted dataset"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw IoError("cannot open config file: " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ParseError("config parse error: " + std::string(e.what()));
            }
            config.apply_json(j);
        }
        // precedence: CLI flag > config file > default
        if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
        if (!out_override.empty()) config.out_dir = out_override;
        if (offline) config.offline = true;

        fs::create_directories(config.out_dir);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "ingest") return cmd_ingest(config);
        if (sub == "enhance") return cmd_enhance(config);
        if (sub == "embed") return cmd_embed(config);
        if (sub == "build") return cmd_build(config);
        if (sub == "train") return cmd_train(config);
        if (sub == "eval") return cmd_eval(config);
        if (sub == "ablate") return cmd_ablate(config);
        if (sub == "sweep") return cmd_sweep(config);
        if (sub == "stats") return cmd_stats(config);
        if (sub == "gradcheck") return cmd_gradcheck(config);
        if (sub == "fixture") return cmd_fixture(config);
        throw InvalidArgument("unknown subcommand " + sub);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
