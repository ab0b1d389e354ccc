#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypersona/enhance.hpp"
#include "hypersona/eval.hpp"
#include "hypersona/fixture.hpp"
#include "test_support.hpp"

using namespace hypersona;

namespace {

std::vector<int> iota_ids(int n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    return ids;
}

}  // namespace

TEST_CASE("split sizes follow floor-then-distribute") {
    const auto s10 = split(iota_ids(10), {0.8, 0.1, 0.1}, 0);
    CHECK(s10.train.size() == 8);
    CHECK(s10.val.size() == 1);
    CHECK(s10.test.size() == 1);

    const auto s12 = split(iota_ids(12), {0.8, 0.1, 0.1}, 0);
    CHECK(s12.train.size() == 9);
    CHECK(s12.val.size() == 1);
    CHECK(s12.test.size() == 2);

    const auto s3 = split(iota_ids(3), {0.8, 0.1, 0.1}, 0);
    CHECK(s3.train.size() == 1);
    CHECK(s3.val.size() == 1);
    CHECK(s3.test.size() == 1);

    CHECK_THROWS_AS(split(iota_ids(2), {0.8, 0.1, 0.1}, 0), InvalidArgument);
    CHECK_THROWS_AS(split(iota_ids(10), {0.5, 0.2, 0.2}, 0), InvalidArgument);
}

TEST_CASE("split is a seeded disjoint partition") {
    const auto ids = iota_ids(50);
    const auto a = split(ids, {0.8, 0.1, 0.1}, 42);
    const auto b = split(ids, {0.8, 0.1, 0.1}, 42);
    CHECK(a.train == b.train);
    CHECK(a.val == b.val);
    CHECK(a.test == b.test);

    const auto c = split(ids, {0.8, 0.1, 0.1}, 43);
    CHECK(a.train != c.train);

    std::set<int> all;
    for (int x : a.train) all.insert(x);
    for (int x : a.val) all.insert(x);
    for (int x : a.test) all.insert(x);
    CHECK(all.size() == 50);
}

TEST_CASE("metrics on perfect predictions") {
    Matrix probs(3, 3);
    probs(0, 0) = 1.0;
    probs(1, 1) = 1.0;
    probs(2, 2) = 1.0;
    const MetricReport r = metrics(probs, {0, 1, 2});
    CHECK(r.accuracy == 1.0);
    CHECK(r.auc == 1.0);
    CHECK(r.macro_f1 == 1.0);
    CHECK(r.micro_f1 == 1.0);
    CHECK(r.confusion[0][0] == 1);
    CHECK(r.confusion[1][1] == 1);
}

TEST_CASE("metrics hand-ranked two-class case") {
    Matrix probs(3, 2);
    probs(0, 0) = 0.9;
    probs(0, 1) = 0.1;
    probs(1, 0) = 0.4;
    probs(1, 1) = 0.6;
    probs(2, 0) = 0.2;
    probs(2, 1) = 0.8;
    const MetricReport r = metrics(probs, {0, 1, 1});
    CHECK(r.accuracy == 1.0);
    CHECK(r.auc == 1.0);
}

TEST_CASE("uniform probabilities give AUC one half") {
    Matrix probs(4, 2, 0.5);
    const MetricReport r = metrics(probs, {0, 0, 1, 1});
    CHECK(r.auc == doctest::Approx(0.5));
    // argmax ties resolve to the lowest class index
    CHECK(r.accuracy == doctest::Approx(0.5));
    CHECK(r.confusion[0][0] == 2);
    CHECK(r.confusion[1][0] == 2);
}

TEST_CASE("metrics match brute force on all small test sets") {
    testsupport::Rng rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 2 + rng.uniform_int(7);  // <= 8
        const std::size_t p = 2 + rng.uniform_int(2);  // <= 3
        Matrix probs(m, p);
        std::vector<int> labels(m);
        bool two_classes = false;
        for (std::size_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                // quantized scores make ties common
                probs(i, j) = 0.125 * static_cast<double>(1 + rng.uniform_int(8));
                sum += probs(i, j);
            }
            for (std::size_t j = 0; j < p; ++j) probs(i, j) /= sum;
            labels[i] = static_cast<int>(rng.uniform_int(p));
        }
        for (std::size_t i = 1; i < m; ++i) two_classes = two_classes || labels[i] != labels[0];
        if (!two_classes) labels[0] = (labels[0] + 1) % static_cast<int>(p);

        const MetricReport r = metrics(probs, labels);

        // accuracy oracle
        int correct = 0;
        for (std::size_t i = 0; i < m; ++i) {
            int best = 0;
            for (std::size_t j = 1; j < p; ++j)
                if (probs(i, j) > probs(i, static_cast<std::size_t>(best))) best = static_cast<int>(j);
            if (best == labels[i]) ++correct;
        }
        CHECK(r.accuracy == doctest::Approx(static_cast<double>(correct) / static_cast<double>(m)));
        CHECK(r.micro_f1 == doctest::Approx(r.accuracy).epsilon(1e-12));

        // AUC oracle: mean pairwise one-vs-rest over classes with both sides
        double auc_sum = 0.0;
        int auc_classes = 0;
        for (std::size_t c = 0; c < p; ++c) {
            std::vector<double> scores(m);
            std::vector<int> pos(m);
            int n_pos = 0;
            for (std::size_t i = 0; i < m; ++i) {
                scores[i] = probs(i, c);
                pos[i] = labels[i] == static_cast<int>(c) ? 1 : 0;
                n_pos += pos[i];
            }
            if (n_pos == 0 || n_pos == static_cast<int>(m)) continue;
            auc_sum += testsupport::pairwise_auc(scores, pos);
            ++auc_classes;
        }
        const double auc_expected = auc_classes > 0 ? auc_sum / auc_classes : 0.5;
        CHECK(r.auc == doctest::Approx(auc_expected).epsilon(1e-12));

        // macro-F1 oracle over present classes
        double f1_sum = 0.0;
        int f1_classes = 0;
        for (std::size_t c = 0; c < p; ++c) {
            int tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < m; ++i) {
                int best = 0;
                for (std::size_t j = 1; j < p; ++j)
                    if (probs(i, j) > probs(i, static_cast<std::size_t>(best)))
                        best = static_cast<int>(j);
                const bool is_c = labels[i] == static_cast<int>(c);
                const bool pred_c = best == static_cast<int>(c);
                tp += is_c && pred_c;
                fp += !is_c && pred_c;
                fn += is_c && !pred_c;
            }
            if (tp + fn == 0) continue;
            const double denom = static_cast<double>(2 * tp + fp + fn);
            f1_sum += denom > 0 ? 2.0 * tp / denom : 0.0;
            ++f1_classes;
        }
        CHECK(r.macro_f1 == doctest::Approx(f1_sum / f1_classes).epsilon(1e-12));
    }
}

TEST_CASE("micro F1 equals accuracy on random prediction sets") {
    testsupport::Rng rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng.uniform_int(20);
        const std::size_t p = 2 + rng.uniform_int(5);
        Matrix probs(m, p);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                probs(i, j) = rng.uniform() + 1e-3;
                sum += probs(i, j);
            }
            for (std::size_t j = 0; j < p; ++j) probs(i, j) /= sum;
            labels[i] = static_cast<int>(rng.uniform_int(p));
        }
        const MetricReport r = metrics(probs, labels);
        CHECK(std::abs(r.micro_f1 - r.accuracy) < 1e-12);
    }
}

TEST_CASE("rescaling probability rows leaves argmax metrics unchanged") {
    testsupport::Rng rng(10);
    Matrix probs(6, 3);
    std::vector<int> labels(6);
    for (std::size_t i = 0; i < 6; ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            probs(i, j) = rng.uniform() + 0.01;
            sum += probs(i, j);
        }
        for (std::size_t j = 0; j < 3; ++j) probs(i, j) /= sum;
        labels[i] = static_cast<int>(rng.uniform_int(3));
    }
    Matrix scaled = probs;
    for (std::size_t i = 0; i < 6; ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            scaled(i, j) *= 3.7;
            sum += scaled(i, j);
        }
        for (std::size_t j = 0; j < 3; ++j) scaled(i, j) /= sum;
    }
    const MetricReport a = metrics(probs, labels);
    const MetricReport b = metrics(scaled, labels);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-12));
    CHECK(a.confusion == b.confusion);
}

TEST_CASE("metrics guards") {
    Matrix empty(0, 2);
    CHECK_THROWS_AS(metrics(empty, {}), InvalidArgument);
}

namespace {

struct FastFixture {
    DatasetBundle bundle;
    FeatureMatrix features;
    ExperimentContext ctx;
    HyperedgeSpec spec;
    TrainConfig config;
};

FastFixture fast_fixture() {
    FastFixture fx;
    FixtureConfig fc;
    fc.num_users = 60;
    fc.num_groups = 6;
    fc.num_classes = 3;
    fc.purity = 1.0;
    fc.seed = 12;
    fx.bundle = make_planted_bundle(fc);

    std::vector<std::string> narratives;
    for (const auto& user : strip_labels(fx.bundle).users)
        narratives.push_back(MockLlmClient().complete(build_prompt(user).rendered, 0.0));
    EmbedderSpec espec;
    espec.dim = 32;
    fx.features = embed(espec, narratives);

    fx.ctx.bundle = &fx.bundle;
    fx.ctx.source = FeatureSource::ENHANCED;
    fx.ctx.enhanced = &fx.features;
    fx.ctx.scheme = LabelScheme::ENNEAGRAM9;

    fx.spec.kinds = {HyperedgeKind::FOR};
    fx.config.layers = 1;
    fx.config.hidden_dim = 16;
    fx.config.max_epochs = 60;
    fx.config.patience = 20;
    return fx;
}

}  // namespace

TEST_CASE("run_experiment aggregates repetitions deterministically") {
    FastFixture fx = fast_fixture();
    const EvalReport once = run_experiment(fx.ctx, fx.spec, fx.config, 1);
    CHECK(once.repetitions.size() == 1);
    CHECK(once.accuracy.stddev == 0.0);
    CHECK(once.accuracy.mean == once.repetitions[0].accuracy);

    const EvalReport multi = run_experiment(fx.ctx, fx.spec, fx.config, 3);
    CHECK(multi.repetitions.size() == 3);
    CHECK(multi.repetitions[0].accuracy == once.repetitions[0].accuracy);

    const EvalReport again = run_experiment(fx.ctx, fx.spec, fx.config, 3);
    CHECK(multi.accuracy.mean == again.accuracy.mean);
    CHECK(multi.accuracy.stddev == again.accuracy.stddev);

    ExperimentContext broken = fx.ctx;
    broken.enhanced = nullptr;
    CHECK_THROWS_AS(run_experiment(broken, fx.spec, fx.config, 1), InvalidArgument);
}

TEST_CASE("ablation produces the seven labeled subset rows") {
    FastFixture fx = fast_fixture();
    TrainConfig quick = fx.config;
    quick.max_epochs = 12;
    quick.patience = 0;
    HyperedgeSpec spec = fx.spec;
    spec.kinds = {HyperedgeKind::TOP, HyperedgeKind::SEM, HyperedgeKind::FOR};
    spec.knn_k = 5;
    const auto rows = ablate_hyperedges(fx.ctx, spec, quick, 1);
    REQUIRE(rows.size() == 7);
    std::set<std::string> names;
    for (const auto& row : rows) names.insert(row.kinds);
    CHECK(names == std::set<std::string>{"TOP", "SEM", "FOR", "TOP+SEM", "TOP+FOR", "SEM+FOR",
                                         "TOP+SEM+FOR"});
}

TEST_CASE("label ratio sweep: identity fraction reproduces run_experiment") {
    FastFixture fx = fast_fixture();
    const EvalReport direct = run_experiment(fx.ctx, fx.spec, fx.config, 2);
    const auto rows = label_ratio_sweep(fx.ctx, fx.spec, fx.config, {0.5, 1.0}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].fraction == 1.0);
    CHECK(rows[1].report.accuracy.mean == direct.accuracy.mean);
    CHECK(rows[1].report.auc.mean == direct.auc.mean);

    CHECK_THROWS_AS(label_ratio_sweep(fx.ctx, fx.spec, fx.config, {0.0}, 1), InvalidArgument);
    CHECK_THROWS_AS(label_ratio_sweep(fx.ctx, fx.spec, fx.config, {1.5}, 1), InvalidArgument);
    // a fraction that empties the training split is an error
    CHECK_THROWS_AS(label_ratio_sweep(fx.ctx, fx.spec, fx.config, {0.001}, 1), InvalidArgument);
}
