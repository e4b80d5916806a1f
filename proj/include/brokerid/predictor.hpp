#pragma once

#include "brokerid/embedding.hpp"
#include "brokerid/gbdt.hpp"
#include "brokerid/influence.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace brokerid {

enum class FeatureMode { centrality, embedding };
const char* to_string(FeatureMode m);
FeatureMode feature_mode_from_string(std::string_view s);

enum class ScoreKind { broker, source };
const char* to_string(ScoreKind s);
ScoreKind score_kind_from_string(std::string_view s);

/// The per-node score column used for labeling.
std::vector<double> score_column(const InfluenceTable& t, ScoreKind kind);

/// Positives are the top-p% nodes (ties to lower index).
std::vector<int> label_top_p(std::span<const double> scores, double p);

struct LabeledDataset {
    Table features;
    std::vector<int> labels;
    double p = 10.0;
    std::string score_name;
    std::string feature_set;
    std::string domain;

    std::size_t size() const { return labels.size(); }
    std::size_t positives() const;
};

LabeledDataset make_dataset(Table features, std::span<const double> scores, double p,
                            std::string score_name, std::string feature_set,
                            std::string domain = "source");

/// The raw base centralities as a table (the `centrality` feature set).
Table centrality_table(const SocialGraph& g, const EmbedConfig& cfg);
/// The log-binned embedding as a table (the `embedding` feature set).
Table embedding_table(const FeatureMatrix& fm);

struct SplitSpec {
    double train_fraction = 0.2; // q
    double tune_fraction = 0.2;  // share of the balanced pool held out for tuning
    std::uint64_t seed = 0;
};

/// Row indices into a LabeledDataset.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> tune;
    std::vector<std::size_t> test;
};

/// Seeded q-fraction node split; the training side is downsampled to balanced
/// classes and split into train/tune; the test side keeps its imbalance.
/// Throws DegenerateSplitError when the training side lacks a class.
Split split_and_downsample(const LabeledDataset& ds, const SplitSpec& spec);

struct TrainResult {
    GbdtModel model;
    std::vector<Trial> trials;
    std::size_t best = 0;
    std::vector<std::string> warnings;
};

TrainResult train(const LabeledDataset& ds, const Split& split, int budget, std::uint64_t seed,
                  const SearchSpace& space = {});

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Metrics {
    Confusion confusion;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Metrics metrics_from_confusion(const Confusion& c);
/// Positive when the predicted probability is >= 0.5.
Metrics evaluate(const GbdtModel& model, const Table& x, std::span<const int> y);

struct FeatureImportance {
    std::string name;
    double gain = 0.0;
};

/// Total split gain per feature, descending (name breaks ties).
std::vector<FeatureImportance> feature_importance(const GbdtModel& model);

struct RunRecord {
    std::uint64_t seed = 0;
    Metrics metrics;
    Hyperparams hyperparams;
    double tune_loss = 0.0;
};

struct ExperimentConfig {
    ScoreKind score = ScoreKind::broker;
    double p = 10.0;
    double q = 0.2;
    FeatureMode feature_mode = FeatureMode::embedding;
    std::uint64_t seed = 0;
    int budget = 30;
    int runs = 10;
    SearchSpace space;
};

struct PredictionReport {
    std::vector<RunRecord> runs;
    double precision = 0.0; // means over runs
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<FeatureImportance> feature_importance; // mean over runs, descending
    ExperimentConfig config;
    std::string score_name;
    std::string feature_set;
    std::string source_domain;
    std::string target_domain;
};

/// Repeats split -> train -> evaluate `cfg.runs` times with seeds derived from
/// `cfg.seed` and averages the test metrics.
PredictionReport run_protocol(const LabeledDataset& ds, const ExperimentConfig& cfg);

/// Trains on the source domain per run and scores the target domain. When both
/// datasets come from the same domain, the source's held-out test rows are used
/// so the result coincides with run_protocol; otherwise every target node is
/// scored. Throws AlignmentError when the feature columns differ.
PredictionReport transfer_evaluate(const LabeledDataset& source, const LabeledDataset& target,
                                   const ExperimentConfig& cfg);

struct SweepPoint {
    double q = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<double> run_f1;
};

std::vector<SweepPoint> training_fraction_sweep(const LabeledDataset& ds,
                                                std::span<const double> fractions,
                                                const ExperimentConfig& cfg);

void to_json(nlohmann::ordered_json& j, const ExperimentConfig& c);
void from_json(const nlohmann::ordered_json& j, ExperimentConfig& c);
void to_json(nlohmann::ordered_json& j, const PredictionReport& r);

void write_report_json(const PredictionReport& r, const std::filesystem::path& path);
/// Header plus one summary row.
void write_report_csv(const PredictionReport& r, const std::filesystem::path& path);
void write_sweep_csv(std::span<const SweepPoint> points, const std::filesystem::path& path);

} // namespace brokerid
