#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace brokerid {

/// Column-major numeric table with named columns.
struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t cols() const { return columns.size(); }
    Table select_rows(std::span<const std::size_t> rows) const;
};

struct Hyperparams {
    int num_trees = 100;
    int max_leaves = 31;
    int max_depth = -1; // unlimited; growth is bounded by max_leaves
    int min_samples_leaf = 20;
    double learning_rate = 0.1;
    double l2 = 1.0;

    bool operator==(const Hyperparams&) const = default;
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf output before shrinkage
    double gain = 0.0;

    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const Table& x, std::size_t row) const;
    bool operator==(const RegressionTree&) const = default;
};

/// Gradient-boosted regression trees on the logistic loss.
struct GbdtModel {
    Hyperparams hyperparams;
    double base_score = 0.0; // log-odds
    std::vector<RegressionTree> trees;
    std::vector<std::string> feature_names;
    std::vector<double> train_loss; // mean log loss after each round
    bool degenerate = false;        // no split was ever found

    double predict_margin(const Table& x, std::size_t row) const;
    double predict_proba(const Table& x, std::size_t row) const;
    std::vector<double> predict_proba(const Table& x) const;

    bool operator==(const GbdtModel&) const = default;
};

GbdtModel fit_gbdt(const Table& x, std::span<const int> y, const Hyperparams& hp);

/// Mean binary log loss with probabilities clipped to [1e-15, 1 - 1e-15].
double log_loss(std::span<const int> y, std::span<const double> prob);

struct SearchSpace {
    int min_trees = 50, max_trees = 400;
    int min_leaves = 7, max_leaves = 63;
    double min_lr = 0.02, max_lr = 0.3; // sampled log-uniformly
    int min_leaf_samples = 5, max_leaf_samples = 50;
};

struct Trial {
    Hyperparams hyperparams;
    double tune_loss = 0.0;
};

struct SearchResult {
    GbdtModel model;
    std::vector<Trial> trials;
    std::size_t best = 0;
};

/// Draws `budget` configurations from `space`, fits each on (x, y) and keeps
/// the one with the lowest log loss on (tune_x, tune_y); the earliest trial
/// wins ties. Trials run concurrently and are reduced in trial order.
SearchResult random_search(const Table& x, std::span<const int> y, const Table& tune_x,
                           std::span<const int> tune_y, int budget, std::uint64_t seed,
                           const SearchSpace& space = {});

/// Per-feature total split gain, in feature order.
std::vector<double> split_gain_importance(const GbdtModel& m);

void to_json(nlohmann::ordered_json& j, const Hyperparams& hp);
void from_json(const nlohmann::ordered_json& j, Hyperparams& hp);
void to_json(nlohmann::ordered_json& j, const GbdtModel& m);
void from_json(const nlohmann::ordered_json& j, GbdtModel& m);

} // namespace brokerid
