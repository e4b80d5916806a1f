#include "brokerid/gbdt.hpp"
#include "brokerid/parallel.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace brokerid;

namespace {

// Two Gaussian blobs, well separated along both axes.
void blobs(std::size_t n, double gap, std::uint64_t seed, Table& x, std::vector<int>& y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    x.names = {"f0", "f1"};
    x.columns.assign(2, {});
    y.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        y.push_back(label);
        x.columns[0].push_back(noise(rng) + label * gap);
        x.columns[1].push_back(noise(rng) - label * gap);
    }
}

} // namespace

TEST(Gbdt, SeparableDataHasLowTuneLoss) {
    Table x, tx;
    std::vector<int> y, ty;
    blobs(400, 8.0, 1, x, y);
    blobs(200, 8.0, 2, tx, ty);
    const auto r = random_search(x, y, tx, ty, 5, 3);
    EXPECT_EQ(r.trials.size(), 5u);
    EXPECT_LT(r.trials[r.best].tune_loss, 0.1);
    EXPECT_LT(log_loss(ty, r.model.predict_proba(tx)), 0.1);
}

TEST(Gbdt, TrainingLossNonIncreasing) {
    Table x;
    std::vector<int> y;
    blobs(300, 1.0, 4, x, y);
    Hyperparams hp;
    hp.num_trees = 60;
    const auto m = fit_gbdt(x, y, hp);
    ASSERT_EQ(m.train_loss.size(), 60u);
    for (std::size_t i = 1; i < m.train_loss.size(); ++i) {
        EXPECT_LE(m.train_loss[i], m.train_loss[i - 1] + 1e-12);
    }
}

TEST(Gbdt, ConstantFeaturesDegenerate) {
    Table x;
    x.names = {"c"};
    x.columns = {std::vector<double>(50, 1.0)};
    std::vector<int> y(50, 0);
    for (std::size_t i = 0; i < 20; ++i) {
        y[i] = 1;
    }
    const auto m = fit_gbdt(x, y, {});
    EXPECT_TRUE(m.degenerate);
    EXPECT_NEAR(m.predict_proba(x, 0), 0.4, 1e-9);
}

TEST(Gbdt, ProbabilitiesInUnitInterval) {
    Table x;
    std::vector<int> y;
    blobs(200, 2.0, 5, x, y);
    const auto m = fit_gbdt(x, y, {});
    for (double p : m.predict_proba(x)) {
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
    }
    for (const auto& t : m.trees) {
        for (const auto& node : t.nodes) {
            EXPECT_LT(node.feature, 2);
        }
    }
}

TEST(Gbdt, ImportanceFavorsInformativeFeature) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 1.0);
    Table x;
    x.names = {"signal", "noise"};
    x.columns.assign(2, {});
    std::vector<int> y;
    for (int i = 0; i < 400; ++i) {
        const int label = i % 2;
        y.push_back(label);
        x.columns[0].push_back(label * 3.0 + noise(rng));
        x.columns[1].push_back(noise(rng));
    }
    const auto imp = split_gain_importance(fit_gbdt(x, y, {}));
    EXPECT_GT(imp[0], imp[1]);
    EXPECT_GE(imp[1], 0.0);
}

TEST(Gbdt, SingleFeatureHoldsAllImportance) {
    Table x, dummy;
    std::vector<int> y;
    blobs(200, 3.0, 7, x, y);
    x.names = {"only"};
    x.columns.resize(1);
    const auto imp = split_gain_importance(fit_gbdt(x, y, {}));
    ASSERT_EQ(imp.size(), 1u);
    EXPECT_GT(imp[0], 0.0);
}

TEST(Gbdt, SearchIsDeterministicAcrossThreads) {
    Table x, tx;
    std::vector<int> y, ty;
    blobs(300, 1.0, 8, x, y);
    blobs(100, 1.0, 9, tx, ty);
    set_num_threads(1);
    const auto a = random_search(x, y, tx, ty, 4, 77);
    set_num_threads(4);
    const auto b = random_search(x, y, tx, ty, 4, 77);
    set_num_threads(0);
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.model, b.model);
    const auto c = random_search(x, y, tx, ty, 4, 78);
    EXPECT_NE(a.trials[0].hyperparams, c.trials[0].hyperparams);
}

TEST(Gbdt, SearchRespectsRanges) {
    Table x, tx;
    std::vector<int> y, ty;
    blobs(100, 2.0, 10, x, y);
    blobs(50, 2.0, 11, tx, ty);
    const SearchSpace s;
    const auto r = random_search(x, y, tx, ty, 1, 5);
    ASSERT_EQ(r.trials.size(), 1u);
    const auto& hp = r.trials[0].hyperparams;
    EXPECT_GE(hp.num_trees, s.min_trees);
    EXPECT_LE(hp.num_trees, s.max_trees);
    EXPECT_GE(hp.max_leaves, s.min_leaves);
    EXPECT_LE(hp.max_leaves, s.max_leaves);
    EXPECT_GE(hp.learning_rate, s.min_lr);
    EXPECT_LE(hp.learning_rate, s.max_lr);
    EXPECT_GE(hp.min_samples_leaf, s.min_leaf_samples);
    EXPECT_LE(hp.min_samples_leaf, s.max_leaf_samples);
}

TEST(Gbdt, JsonRoundTrip) {
    Table x;
    std::vector<int> y;
    blobs(120, 2.0, 12, x, y);
    Hyperparams hp;
    hp.num_trees = 10;
    const auto m = fit_gbdt(x, y, hp);
    nlohmann::ordered_json j = m;
    const auto back = j.get<GbdtModel>();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        EXPECT_EQ(back.predict_margin(x, r), m.predict_margin(x, r));
    }
}

TEST(Gbdt, LogLossClips) {
    const std::vector<int> y{1, 0};
    const std::vector<double> p{0.0, 1.0};
    EXPECT_NEAR(log_loss(y, p), -std::log(1e-15), 1e-3);
}
