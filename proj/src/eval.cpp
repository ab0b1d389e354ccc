#include "hypersona/eval.hpp"

#include <algorithm>
#include <cmath>

#include "hypersona/enhance.hpp"

namespace hypersona {

SplitAssignment split(const std::vector<int>& labeled_ids, std::array<double, 3> ratios,
                      std::uint64_t seed) {
    const std::size_t n = labeled_ids.size();
    if (n < 3) throw InvalidArgument("split: need at least 3 labeled ids");
    for (double r : ratios)
        if (r < 0.0) throw InvalidArgument("split: ratios must be nonnegative");
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("split: ratios must sum to 1");

    std::vector<int> ids = labeled_ids;
    Rng rng(seed);
    rng.shuffle(ids);

    std::size_t n_train = static_cast<std::size_t>(std::floor(ratios[0] * static_cast<double>(n)));
    std::size_t n_val = static_cast<std::size_t>(std::floor(ratios[1] * static_cast<double>(n)));
    std::size_t n_test = static_cast<std::size_t>(std::floor(ratios[2] * static_cast<double>(n)));
    n_test += n - (n_train + n_val + n_test);  // remainder joins the test split

    // Keep val and test non-empty when the ratios ask for them.
    if (n_val == 0 && ratios[1] > 0.0 && n_train > 1) {
        n_val = 1;
        n_train -= 1;
    }
    if (n_test == 0 && ratios[2] > 0.0 && n_train > 1) {
        n_test = 1;
        n_train -= 1;
    }

    SplitAssignment out;
    out.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
    out.val.assign(ids.begin() + static_cast<long>(n_train),
                   ids.begin() + static_cast<long>(n_train + n_val));
    out.test.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
    return out;
}

MetricReport metrics(const Matrix& probs, const std::vector<int>& true_labels) {
    const std::size_t m = probs.rows();
    const std::size_t p = probs.cols();
    if (m == 0) throw InvalidArgument("metrics: empty test set");
    if (true_labels.size() != m) throw InvalidArgument("metrics: label count != rows");

    MetricReport report;
    report.num_samples = static_cast<int>(m);
    report.confusion.assign(p, std::vector<int>(p, 0));

    int correct = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const int t = true_labels[i];
        if (t < 0 || static_cast<std::size_t>(t) >= p)
            throw InvalidArgument("metrics: label out of range at row " + std::to_string(i));
        const int pred = argmax_row(probs, i);
        report.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(pred)] += 1;
        if (pred == t) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(m);

    // Per-class precision/recall and the macro F1 over classes present in the
    // test set (absent classes are skipped to avoid 0/0).
    report.precision.assign(p, 0.0);
    report.recall.assign(p, 0.0);
    double f1_sum = 0.0;
    int f1_classes = 0;
    long tp_total = 0, fp_total = 0, fn_total = 0;
    for (std::size_t c = 0; c < p; ++c) {
        long tp = report.confusion[c][c];
        long fn = 0, fp = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (j != c) {
                fn += report.confusion[c][j];
                fp += report.confusion[j][c];
            }
        }
        tp_total += tp;
        fp_total += fp;
        fn_total += fn;
        const long support = tp + fn;
        report.precision[c] = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        report.recall[c] = support > 0 ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
        if (support > 0) {
            const double pr = report.precision[c];
            const double rc = report.recall[c];
            f1_sum += (pr + rc) > 0.0 ? 2.0 * pr * rc / (pr + rc) : 0.0;
            ++f1_classes;
        }
    }
    report.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
    report.micro_f1 = static_cast<double>(tp_total) /
                      (static_cast<double>(tp_total) + 0.5 * static_cast<double>(fp_total + fn_total));

    // Macro one-vs-rest AUC via midranks, over classes with both positives
    // and negatives in the test set.
    double auc_sum = 0.0;
    int auc_classes = 0;
    std::vector<std::pair<double, int>> scored(m);  // (score, is_positive)
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < m; ++i) {
            scored[i] = {probs(i, c), true_labels[i] == static_cast<int>(c) ? 1 : 0};
            n_pos += static_cast<std::size_t>(scored[i].second);
        }
        if (n_pos == 0 || n_pos == m) continue;
        std::sort(scored.begin(), scored.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double rank_sum_pos = 0.0;
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j < m && scored[j].first == scored[i].first) ++j;
            const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
            for (std::size_t k = i; k < j; ++k)
                if (scored[k].second) rank_sum_pos += midrank;
            i = j;
        }
        const double np = static_cast<double>(n_pos);
        const double nn = static_cast<double>(m - n_pos);
        auc_sum += (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
        ++auc_classes;
    }
    report.auc = auc_classes > 0 ? auc_sum / auc_classes : 0.5;
    return report;
}

namespace {

MetricStat stat_of(const std::vector<MetricReport>& reps, double MetricReport::* field) {
    MetricStat s;
    if (reps.empty()) return s;
    for (const auto& r : reps) s.mean += r.*field;
    s.mean /= static_cast<double>(reps.size());
    double var = 0.0;
    for (const auto& r : reps) {
        const double d = r.*field - s.mean;
        var += d * d;
    }
    s.stddev = std::sqrt(var / static_cast<double>(reps.size()));
    return s;
}

}  // namespace

EvalReport aggregate(std::vector<MetricReport> repetitions) {
    EvalReport report;
    report.accuracy = stat_of(repetitions, &MetricReport::accuracy);
    report.auc = stat_of(repetitions, &MetricReport::auc);
    report.macro_f1 = stat_of(repetitions, &MetricReport::macro_f1);
    report.micro_f1 = stat_of(repetitions, &MetricReport::micro_f1);
    if (!repetitions.empty()) {
        const std::size_t p = repetitions.front().confusion.size();
        report.confusion.assign(p, std::vector<int>(p, 0));
        for (const auto& r : repetitions)
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) report.confusion[i][j] += r.confusion[i][j];
    }
    report.repetitions = std::move(repetitions);
    return report;
}

std::string feature_source_name(FeatureSource source) {
    return source == FeatureSource::ENHANCED ? "enhanced" : "raw";
}

FeatureSource feature_source_from_name(const std::string& name) {
    if (name == "enhanced" || name == "ENHANCED") return FeatureSource::ENHANCED;
    if (name == "raw" || name == "RAW") return FeatureSource::RAW;
    throw ParseError("unknown feature source \"" + name + "\"");
}

std::pair<std::vector<int>, std::vector<int>> labeled_nodes(const DatasetBundle& bundle,
                                                            LabelScheme scheme) {
    std::vector<int> ids;
    std::vector<int> labels(bundle.users.size(), -1);
    for (const auto& user : bundle.users) {
        int cls = -1;
        if (scheme == LabelScheme::MBTI16 && user.mbti)
            cls = user.mbti->class_index();
        else if (scheme == LabelScheme::ENNEAGRAM9 && user.enneagram)
            cls = *user.enneagram - 1;
        if (cls >= 0) {
            ids.push_back(user.user_id);
            labels[static_cast<std::size_t>(user.user_id)] = cls;
        }
    }
    return {std::move(ids), std::move(labels)};
}

namespace {

struct PreparedExperiment {
    FeatureMatrix features;
    Hypergraph graph;
    PropagationOperator op;
    std::vector<int> labeled_ids;
    std::vector<int> labels;
};

PreparedExperiment prepare(const ExperimentContext& ctx, const HyperedgeSpec& spec) {
    if (!ctx.bundle) throw InvalidArgument("experiment: no dataset bundle");
    PreparedExperiment prep;
    if (ctx.source == FeatureSource::ENHANCED) {
        if (!ctx.enhanced)
            throw InvalidArgument(
                "experiment: feature source is `enhanced` but no enhanced feature store is "
                "available");
        prep.features = *ctx.enhanced;
    } else {
        prep.features = raw_feature_matrix(*ctx.bundle);
    }
    if (prep.features.rows() != static_cast<std::size_t>(ctx.bundle->num_users()))
        throw InvalidArgument("experiment: feature rows != number of users");

    prep.graph = assemble(spec, *ctx.bundle, &prep.features);
    prep.op = propagation_operator(prep.graph);
    auto [ids, labels] = labeled_nodes(*ctx.bundle, ctx.scheme);
    if (ids.empty()) throw InvalidArgument("experiment: no labeled users for the scheme");
    prep.labeled_ids = std::move(ids);
    prep.labels = std::move(labels);
    return prep;
}

MetricReport run_one(const PreparedExperiment& prep, const ExperimentContext& ctx,
                     const TrainConfig& base_config, std::uint64_t seed, double train_fraction) {
    SplitAssignment assignment = split(prep.labeled_ids, ctx.ratios, seed);

    std::vector<int> train_ids = assignment.train;
    if (train_fraction < 1.0) {
        const auto keep = static_cast<std::size_t>(
            std::floor(train_fraction * static_cast<double>(train_ids.size())));
        if (keep == 0)
            throw InvalidArgument("label ratio sweep: fraction leaves an empty training split");
        Rng rng(seed ^ 0x5EEDF00DULL);
        rng.shuffle(train_ids);
        train_ids.resize(keep);
    }

    TrainConfig config = base_config;
    config.seed = seed;
    TrainResult trained = train(prep.op, prep.features, prep.labels,
                                num_classes(ctx.scheme), train_ids, assignment.val, config);

    Matrix probs = forward(prep.op, prep.features, trained.params, config, /*training=*/false);
    Matrix test_probs(assignment.test.size(), probs.cols());
    std::vector<int> test_labels(assignment.test.size());
    for (std::size_t r = 0; r < assignment.test.size(); ++r) {
        const auto id = static_cast<std::size_t>(assignment.test[r]);
        for (std::size_t j = 0; j < probs.cols(); ++j) test_probs(r, j) = probs(id, j);
        test_labels[r] = prep.labels[id];
    }
    return metrics(test_probs, test_labels);
}

}  // namespace

EvalReport run_experiment(const ExperimentContext& ctx, const HyperedgeSpec& spec,
                          const TrainConfig& config, int n_reps) {
    if (n_reps < 1) throw InvalidArgument("run_experiment: n_reps must be >= 1");
    PreparedExperiment prep = prepare(ctx, spec);
    std::vector<MetricReport> reps;
    reps.reserve(static_cast<std::size_t>(n_reps));
    for (int r = 0; r < n_reps; ++r)
        reps.push_back(run_one(prep, ctx, config, config.seed + static_cast<std::uint64_t>(r), 1.0));
    return aggregate(std::move(reps));
}

std::vector<AblationRow> ablate_hyperedges(const ExperimentContext& ctx,
                                           const HyperedgeSpec& spec, const TrainConfig& config,
                                           int n_reps) {
    static const std::vector<std::vector<HyperedgeKind>> subsets = {
        {HyperedgeKind::TOP},
        {HyperedgeKind::SEM},
        {HyperedgeKind::FOR},
        {HyperedgeKind::TOP, HyperedgeKind::SEM},
        {HyperedgeKind::TOP, HyperedgeKind::FOR},
        {HyperedgeKind::SEM, HyperedgeKind::FOR},
        {HyperedgeKind::TOP, HyperedgeKind::SEM, HyperedgeKind::FOR},
    };
    std::vector<AblationRow> rows;
    for (const auto& subset : subsets) {
        HyperedgeSpec sub_spec = spec;
        sub_spec.kinds = std::set<HyperedgeKind>(subset.begin(), subset.end());
        std::string name;
        for (const auto kind : subset) {
            if (!name.empty()) name += "+";
            name += kind_name(kind);
        }
        rows.push_back({name, run_experiment(ctx, sub_spec, config, n_reps)});
    }
    return rows;
}

std::vector<SweepRow> label_ratio_sweep(const ExperimentContext& ctx, const HyperedgeSpec& spec,
                                        const TrainConfig& config,
                                        const std::vector<double>& fractions, int n_reps) {
    if (n_reps < 1) throw InvalidArgument("label_ratio_sweep: n_reps must be >= 1");
    for (double f : fractions)
        if (!(f > 0.0) || f > 1.0)
            throw InvalidArgument("label_ratio_sweep: fractions must lie in (0, 1]");
    PreparedExperiment prep = prepare(ctx, spec);
    std::vector<SweepRow> rows;
    for (double f : fractions) {
        std::vector<MetricReport> reps;
        for (int r = 0; r < n_reps; ++r)
            reps.push_back(run_one(prep, ctx, config, config.seed + static_cast<std::uint64_t>(r), f));
        rows.push_back({f, aggregate(std::move(reps))});
    }
    return rows;
}

}  // namespace hypersona
