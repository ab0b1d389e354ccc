#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hypersona/envgen.hpp"
#include "hypersona/hgnn.hpp"
#include "hypersona/ingest.hpp"

namespace hypersona {

// Train/validation/test split over labeled node ids only.
struct SplitAssignment {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

// Seeded shuffle followed by a contiguous cut. Sizes are the floors of the
// ratio shares with any remainder joining the test split; val/test are then
// kept non-empty by borrowing from train.
SplitAssignment split(const std::vector<int>& labeled_ids, std::array<double, 3> ratios,
                      std::uint64_t seed);

struct MetricReport {
    double accuracy = 0.0;
    double auc = 0.0;       // macro one-vs-rest, midrank tie handling
    double macro_f1 = 0.0;  // unweighted mean over classes present in the test set
    double micro_f1 = 0.0;  // equals accuracy for single-label multi-class
    std::vector<std::vector<int>> confusion;  // [true][predicted]
    std::vector<double> precision;            // per class
    std::vector<double> recall;               // per class
    int num_samples = 0;
};

// Test-set metrics from a probability matrix. Argmax ties resolve toward the
// lowest class index; classes absent from the test set are skipped in the
// macro averages.
MetricReport metrics(const Matrix& probs, const std::vector<int>& true_labels);

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation over repetitions
};

struct EvalReport {
    std::vector<MetricReport> repetitions;
    MetricStat accuracy, auc, macro_f1, micro_f1;
    std::vector<std::vector<int>> confusion;  // pooled over repetitions
};

EvalReport aggregate(std::vector<MetricReport> repetitions);

enum class FeatureSource { ENHANCED, RAW };

std::string feature_source_name(FeatureSource source);
FeatureSource feature_source_from_name(const std::string& name);

// Inputs shared by the experiment grid operations. `enhanced` must be present
// when the source is ENHANCED; RAW features are derived from the bundle.
struct ExperimentContext {
    const DatasetBundle* bundle = nullptr;
    FeatureSource source = FeatureSource::ENHANCED;
    const FeatureMatrix* enhanced = nullptr;
    LabelScheme scheme = LabelScheme::MBTI16;
    std::array<double, 3> ratios = {0.8, 0.1, 0.1};
};

// Labeled node ids and the dense per-node class vector (-1 = unlabeled) for a
// scheme.
std::pair<std::vector<int>, std::vector<int>> labeled_nodes(const DatasetBundle& bundle,
                                                            LabelScheme scheme);

// Repetition protocol: for repetition r, a fresh split and initialization
// with seed base_seed + r, full training, then test metrics; aggregated
// mean/std over repetitions.
EvalReport run_experiment(const ExperimentContext& ctx, const HyperedgeSpec& spec,
                          const TrainConfig& config, int n_reps);

struct AblationRow {
    std::string kinds;  // "FOR", "TOP+SEM", ...
    EvalReport report;
};

// One run_experiment per non-empty subset of {TOP, SEM, FOR}; 7 rows.
std::vector<AblationRow> ablate_hyperedges(const ExperimentContext& ctx,
                                           const HyperedgeSpec& spec, const TrainConfig& config,
                                           int n_reps);

struct SweepRow {
    double fraction = 0.0;
    EvalReport report;
};

// Subsamples the training split to each fraction (seeded) before training;
// validation and test stay untouched.
std::vector<SweepRow> label_ratio_sweep(const ExperimentContext& ctx, const HyperedgeSpec& spec,
                                        const TrainConfig& config,
                                        const std::vector<double>& fractions, int n_reps);

}  // namespace hypersona
