#include "brokerid/gbdt.hpp"

#include "brokerid/errors.hpp"
#include "brokerid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace brokerid {

Table Table::select_rows(std::span<const std::size_t> rows) const {
    Table t;
    t.names = names;
    t.columns.resize(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        t.columns[c].reserve(rows.size());
        for (auto r : rows) {
            t.columns[c].push_back(columns[c][r]);
        }
    }
    return t;
}

double RegressionTree::predict(const Table& x, std::size_t row) const {
    int i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = x.columns[n.feature][row] <= n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
}

double GbdtModel::predict_margin(const Table& x, std::size_t row) const {
    double s = 0.0;
    for (const auto& t : trees) {
        s += t.predict(x, row);
    }
    return base_score + hyperparams.learning_rate * s;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Feature values recoded as ranks among the feature's distinct training values,
// so an exact split search is a scan over per-value gradient histograms.
struct CodedFeature {
    std::vector<double> distinct;     // ascending
    std::vector<std::uint32_t> code;  // per row
};

CodedFeature code_feature(std::span<const double> values) {
    CodedFeature f;
    f.distinct.assign(values.begin(), values.end());
    std::sort(f.distinct.begin(), f.distinct.end());
    f.distinct.erase(std::unique(f.distinct.begin(), f.distinct.end()), f.distinct.end());
    f.code.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        f.code[i] = static_cast<std::uint32_t>(
            std::lower_bound(f.distinct.begin(), f.distinct.end(), values[i]) - f.distinct.begin());
    }
    return f;
}

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    std::uint32_t code = 0; // rows with code <= this go left
    double threshold = 0.0;
};

struct Leaf {
    int node = 0;
    int depth = 0;
    std::vector<std::uint32_t> rows;
    double g = 0.0;
    double h = 0.0;
    SplitCandidate best;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<CodedFeature>& features, const Hyperparams& hp)
        : features_(features), hp_(hp) {}

    RegressionTree build(std::span<const double> grad, std::span<const double> hess) {
        grad_ = grad;
        hess_ = hess;
        RegressionTree tree;
        Leaf root;
        root.rows.resize(grad.size());
        std::iota(root.rows.begin(), root.rows.end(), 0u);
        for (auto r : root.rows) {
            root.g += grad[r];
            root.h += hess[r];
        }
        tree.nodes.push_back(TreeNode{});
        std::vector<Leaf> leaves;
        find_split(root);
        leaves.push_back(std::move(root));

        int leaf_count = 1;
        while (leaf_count < hp_.max_leaves) {
            // Best-first: expand the leaf with the largest gain (lowest node id on ties).
            int pick = -1;
            for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
                if (leaves[i].best.feature < 0) {
                    continue;
                }
                if (pick < 0 || leaves[i].best.gain > leaves[pick].best.gain ||
                    (leaves[i].best.gain == leaves[pick].best.gain &&
                     leaves[i].node < leaves[pick].node)) {
                    pick = i;
                }
            }
            if (pick < 0) {
                break;
            }
            Leaf parent = std::move(leaves[pick]);
            leaves.erase(leaves.begin() + pick);
            Leaf left, right;
            left.depth = right.depth = parent.depth + 1;
            const auto& codes = features_[parent.best.feature].code;
            for (auto r : parent.rows) {
                Leaf& side = codes[r] <= parent.best.code ? left : right;
                side.rows.push_back(r);
                side.g += grad_[r];
                side.h += hess_[r];
            }
            left.node = static_cast<int>(tree.nodes.size());
            right.node = left.node + 1;
            auto& pn = tree.nodes[parent.node];
            pn.feature = parent.best.feature;
            pn.threshold = parent.best.threshold;
            pn.gain = parent.best.gain;
            pn.left = left.node;
            pn.right = right.node;
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
            find_split(left);
            find_split(right);
            leaves.push_back(std::move(left));
            leaves.push_back(std::move(right));
            ++leaf_count;
        }
        for (const auto& leaf : leaves) {
            tree.nodes[leaf.node].value = -leaf.g / (leaf.h + hp_.l2);
        }
        return tree;
    }

private:
    void find_split(Leaf& leaf) {
        leaf.best = SplitCandidate{};
        const auto n = leaf.rows.size();
        const auto min_leaf = static_cast<std::size_t>(std::max(1, hp_.min_samples_leaf));
        if (n < 2 * min_leaf || (hp_.max_depth >= 0 && leaf.depth >= hp_.max_depth)) {
            return;
        }
        const double parent_score = leaf.g * leaf.g / (leaf.h + hp_.l2);
        for (std::size_t f = 0; f < features_.size(); ++f) {
            const auto& feat = features_[f];
            const std::size_t d = feat.distinct.size();
            if (d < 2) {
                continue;
            }
            hg_.assign(d, 0.0);
            hh_.assign(d, 0.0);
            hc_.assign(d, 0);
            for (auto r : leaf.rows) {
                const auto c = feat.code[r];
                hg_[c] += grad_[r];
                hh_[c] += hess_[r];
                ++hc_[c];
            }
            double gl = 0.0, hl = 0.0;
            std::size_t cl = 0;
            for (std::size_t c = 0; c + 1 < d; ++c) {
                if (hc_[c] == 0) {
                    continue;
                }
                gl += hg_[c];
                hl += hh_[c];
                cl += hc_[c];
                if (cl < min_leaf) {
                    continue;
                }
                if (n - cl < min_leaf) {
                    break;
                }
                const double gr = leaf.g - gl;
                const double hr = leaf.h - hl;
                const double gain =
                    0.5 * (gl * gl / (hl + hp_.l2) + gr * gr / (hr + hp_.l2) - parent_score);
                if (gain > leaf.best.gain + 1e-12) {
                    // Next occupied value bounds the split from above.
                    std::size_t next = c + 1;
                    while (hc_[next] == 0) {
                        ++next;
                    }
                    double thr = 0.5 * (feat.distinct[c] + feat.distinct[next]);
                    if (!(thr < feat.distinct[next])) {
                        thr = feat.distinct[c];
                    }
                    // Route on the original value: anything up to distinct[c] goes left.
                    leaf.best = SplitCandidate{gain, static_cast<int>(f),
                                               static_cast<std::uint32_t>(next - 1), thr};
                }
            }
        }
    }

    const std::vector<CodedFeature>& features_;
    const Hyperparams& hp_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    std::vector<double> hg_, hh_;
    std::vector<std::size_t> hc_;
};

} // namespace

double GbdtModel::predict_proba(const Table& x, std::size_t row) const {
    return sigmoid(predict_margin(x, row));
}

std::vector<double> GbdtModel::predict_proba(const Table& x) const {
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out[r] = predict_proba(x, r);
    }
    return out;
}

double log_loss(std::span<const int> y, std::span<const double> prob) {
    if (y.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = std::clamp(prob[i], 1e-15, 1.0 - 1e-15);
        s -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    return s / static_cast<double>(y.size());
}

GbdtModel fit_gbdt(const Table& x, std::span<const int> y, const Hyperparams& hp) {
    if (x.rows() != y.size()) {
        throw ArgumentError("feature rows and labels differ in length");
    }
    if (y.empty()) {
        throw ArgumentError("cannot fit on an empty training set");
    }
    GbdtModel m;
    m.hyperparams = hp;
    m.feature_names = x.names;
    const std::size_t n = y.size();
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    m.base_score = std::log(prior / (1.0 - prior));

    std::vector<CodedFeature> features;
    features.reserve(x.cols());
    for (const auto& col : x.columns) {
        features.push_back(code_feature(col));
    }
    std::vector<double> margin(n, m.base_score), grad(n), hess(n), prob(n);
    TreeBuilder builder(features, hp);
    bool any_split = false;
    for (int t = 0; t < hp.num_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - y[i];
            hess[i] = std::max(p * (1.0 - p), 1e-16);
        }
        RegressionTree tree = builder.build(grad, hess);
        any_split = any_split || tree.nodes.size() > 1;
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += hp.learning_rate * tree.predict(x, i);
            prob[i] = sigmoid(margin[i]);
        }
        m.train_loss.push_back(log_loss(y, prob));
        m.trees.push_back(std::move(tree));
    }
    m.degenerate = !any_split;
    return m;
}

SearchResult random_search(const Table& x, std::span<const int> y, const Table& tune_x,
                           std::span<const int> tune_y, int budget, std::uint64_t seed,
                           const SearchSpace& space) {
    if (budget < 1) {
        throw ArgumentError("search budget must be >= 1");
    }
    if (tune_y.empty()) {
        throw ArgumentError("tuning set is empty");
    }
    std::mt19937_64 rng(seed);
    std::vector<Trial> trials(static_cast<std::size_t>(budget));
    for (auto& t : trials) {
        Hyperparams hp;
        hp.num_trees = std::uniform_int_distribution<int>(space.min_trees, space.max_trees)(rng);
        hp.max_leaves = std::uniform_int_distribution<int>(space.min_leaves, space.max_leaves)(rng);
        const double lo = std::log(space.min_lr), hi = std::log(space.max_lr);
        hp.learning_rate = std::exp(std::uniform_real_distribution<double>(lo, hi)(rng));
        hp.min_samples_leaf =
            std::uniform_int_distribution<int>(space.min_leaf_samples, space.max_leaf_samples)(rng);
        t.hyperparams = hp;
    }
    std::vector<GbdtModel> models(trials.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials.size()); ++i) {
        models[i] = fit_gbdt(x, y, trials[i].hyperparams);
        trials[i].tune_loss = log_loss(tune_y, models[i].predict_proba(tune_x));
    }
    SearchResult r;
    for (std::size_t i = 1; i < trials.size(); ++i) {
        if (trials[i].tune_loss < trials[r.best].tune_loss) {
            r.best = i;
        }
    }
    r.model = std::move(models[r.best]);
    r.trials = std::move(trials);
    return r;
}

std::vector<double> split_gain_importance(const GbdtModel& m) {
    std::vector<double> imp(m.feature_names.size(), 0.0);
    for (const auto& t : m.trees) {
        for (const auto& n : t.nodes) {
            if (n.feature >= 0) {
                imp[n.feature] += n.gain;
            }
        }
    }
    return imp;
}

void to_json(nlohmann::ordered_json& j, const Hyperparams& hp) {
    j = {{"num_trees", hp.num_trees},
         {"max_leaves", hp.max_leaves},
         {"max_depth", hp.max_depth},
         {"min_samples_leaf", hp.min_samples_leaf},
         {"learning_rate", hp.learning_rate},
         {"l2", hp.l2}};
}

void from_json(const nlohmann::ordered_json& j, Hyperparams& hp) {
    hp.num_trees = j.at("num_trees").get<int>();
    hp.max_leaves = j.at("max_leaves").get<int>();
    hp.max_depth = j.at("max_depth").get<int>();
    hp.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.l2 = j.value("l2", 1.0);
}

void to_json(nlohmann::ordered_json& j, const GbdtModel& m) {
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const auto& t : m.trees) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& n : t.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.gain});
        }
        trees.push_back(std::move(nodes));
    }
    j = {{"hyperparams", m.hyperparams},
         {"base_score", m.base_score},
         {"feature_names", m.feature_names},
         {"degenerate", m.degenerate},
         {"train_loss", m.train_loss},
         {"trees", trees}};
}

void from_json(const nlohmann::ordered_json& j, GbdtModel& m) {
    m.hyperparams = j.at("hyperparams").get<Hyperparams>();
    m.base_score = j.at("base_score").get<double>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.degenerate = j.value("degenerate", false);
    m.train_loss = j.value("train_loss", std::vector<double>{});
    m.trees.clear();
    for (const auto& t : j.at("trees")) {
        RegressionTree tree;
        for (const auto& n : t) {
            tree.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(),
                                          n.at(2).get<int>(), n.at(3).get<int>(),
                                          n.at(4).get<double>(), n.at(5).get<double>()});
        }
        m.trees.push_back(std::move(tree));
    }
}

} // namespace brokerid
