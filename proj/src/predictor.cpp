#include "brokerid/predictor.hpp"

#include "brokerid/config_io.hpp"
#include "brokerid/errors.hpp"
#include "brokerid/parallel.hpp"
#include "brokerid/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <random>

namespace brokerid {

const char* to_string(FeatureMode m) {
    return m == FeatureMode::centrality ? "centrality" : "embedding";
}

FeatureMode feature_mode_from_string(std::string_view s) {
    if (s == "centrality") return FeatureMode::centrality;
    if (s == "embedding") return FeatureMode::embedding;
    throw ArgumentError("unknown feature mode '" + std::string(s) + "'");
}

const char* to_string(ScoreKind s) { return s == ScoreKind::broker ? "broker" : "source"; }

ScoreKind score_kind_from_string(std::string_view s) {
    if (s == "broker") return ScoreKind::broker;
    if (s == "source") return ScoreKind::source;
    throw ArgumentError("unknown score '" + std::string(s) + "'");
}

std::vector<double> score_column(const InfluenceTable& t, ScoreKind kind) {
    const auto& src = kind == ScoreKind::broker ? t.broker_score : t.source_score;
    return {src.begin(), src.end()};
}

std::vector<int> label_top_p(std::span<const double> scores, double p) {
    const TopSet top = top_p_set(scores, p);
    std::vector<int> labels(scores.size(), 0);
    for (NodeId v : top.members) {
        labels[v] = 1;
    }
    return labels;
}

std::size_t LabeledDataset::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

LabeledDataset make_dataset(Table features, std::span<const double> scores, double p,
                            std::string score_name, std::string feature_set, std::string domain) {
    if (features.rows() != scores.size()) {
        throw AlignmentError("feature rows do not match score length");
    }
    LabeledDataset ds;
    ds.labels = label_top_p(scores, p);
    ds.features = std::move(features);
    ds.p = p;
    ds.score_name = std::move(score_name);
    ds.feature_set = std::move(feature_set);
    ds.domain = std::move(domain);
    return ds;
}

Table centrality_table(const SocialGraph& g, const EmbedConfig& cfg) {
    Table t;
    for (Measure m : cfg.base_features) {
        t.names.emplace_back(to_string(m));
        t.columns.push_back(compute_centrality(g, m, cfg.centrality).values);
    }
    return t;
}

Table embedding_table(const FeatureMatrix& fm) {
    Table t;
    t.names = fm.names();
    t.columns = fm.transformed;
    return t;
}

Split split_and_downsample(const LabeledDataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ArgumentError("train fraction must lie in (0, 1)");
    }
    if (!(spec.tune_fraction > 0.0 && spec.tune_fraction < 1.0)) {
        throw ArgumentError("tune fraction must lie in (0, 1)");
    }
    const std::size_t n = ds.size();
    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    const auto train_side =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < train_side; ++i) {
        (ds.labels[perm[i]] ? pos : neg).push_back(perm[i]);
    }
    if (pos.empty() || neg.empty()) {
        throw DegenerateSplitError("training side has " + std::to_string(pos.size()) +
                                   " positives and " + std::to_string(neg.size()) + " negatives");
    }
    // Both lists are already in random order, so truncation samples without replacement.
    const std::size_t m = std::min(pos.size(), neg.size());
    pos.resize(m);
    neg.resize(m);
    std::vector<std::size_t> pool;
    pool.reserve(2 * m);
    pool.insert(pool.end(), pos.begin(), pos.end());
    pool.insert(pool.end(), neg.begin(), neg.end());
    std::shuffle(pool.begin(), pool.end(), rng);

    auto tune_n =
        static_cast<std::size_t>(std::llround(spec.tune_fraction * static_cast<double>(pool.size())));
    tune_n = std::clamp<std::size_t>(tune_n, 1, pool.size() - 1);
    Split s;
    s.tune.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(tune_n));
    s.train.assign(pool.begin() + static_cast<std::ptrdiff_t>(tune_n), pool.end());
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_side), perm.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

namespace {

std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) {
        out.push_back(labels[r]);
    }
    return out;
}

PredictionReport summarize(std::vector<RunRecord> runs, std::vector<std::vector<double>> importances,
                           const std::vector<std::string>& names, const ExperimentConfig& cfg,
                           const LabeledDataset& source, const LabeledDataset& target) {
    PredictionReport r;
    r.config = cfg;
    r.score_name = source.score_name;
    r.feature_set = source.feature_set;
    r.source_domain = source.domain;
    r.target_domain = target.domain;
    const double k = static_cast<double>(runs.size());
    for (const auto& run : runs) {
        r.precision += run.metrics.precision / k;
        r.recall += run.metrics.recall / k;
        r.f1 += run.metrics.f1 / k;
    }
    std::vector<double> mean(names.size(), 0.0);
    for (const auto& imp : importances) {
        for (std::size_t f = 0; f < imp.size(); ++f) {
            mean[f] += imp[f] / k;
        }
    }
    for (std::size_t f = 0; f < names.size(); ++f) {
        r.feature_importance.push_back({names[f], mean[f]});
    }
    std::stable_sort(r.feature_importance.begin(), r.feature_importance.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) {
                         return a.gain > b.gain || (a.gain == b.gain && a.name < b.name);
                     });
    r.runs = std::move(runs);
    return r;
}

PredictionReport run_experiment(const LabeledDataset& source, const LabeledDataset& target,
                                const ExperimentConfig& cfg, bool score_all_target) {
    if (cfg.runs < 1) {
        throw ArgumentError("runs must be >= 1");
    }
    if (source.features.names != target.features.names) {
        throw AlignmentError("source and target feature columns differ");
    }
    std::vector<RunRecord> runs(static_cast<std::size_t>(cfg.runs));
    std::vector<std::vector<double>> importances(runs.size());
    std::vector<std::exception_ptr> errors(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < cfg.runs; ++i) {
        try {
            const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
            const Split split = split_and_downsample(source, SplitSpec{cfg.q, 0.2, seed});
            TrainResult tr = train(source, split, cfg.budget, derive_seed(seed, "search"), cfg.space);
            Metrics m;
            if (score_all_target) {
                m = evaluate(tr.model, target.features, target.labels);
            } else {
                m = evaluate(tr.model, target.features.select_rows(split.test),
                             gather(target.labels, split.test));
            }
            runs[i] = RunRecord{seed, m, tr.model.hyperparams, tr.trials[tr.best].tune_loss};
            importances[i] = split_gain_importance(tr.model);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return summarize(std::move(runs), std::move(importances), source.features.names, cfg, source,
                     target);
}

} // namespace

TrainResult train(const LabeledDataset& ds, const Split& split, int budget, std::uint64_t seed,
                  const SearchSpace& space) {
    if (split.train.empty() || split.tune.empty()) {
        throw ArgumentError("train and tune sets must be non-empty");
    }
    const Table x = ds.features.select_rows(split.train);
    const Table tx = ds.features.select_rows(split.tune);
    const auto y = gather(ds.labels, split.train);
    const auto ty = gather(ds.labels, split.tune);
    SearchResult sr = random_search(x, y, tx, ty, budget, seed, space);
    TrainResult tr{std::move(sr.model), std::move(sr.trials), sr.best, {}};
    if (tr.model.degenerate) {
        tr.warnings.emplace_back("no informative split found; model predicts the base rate");
    }
    return tr;
}

Metrics metrics_from_confusion(const Confusion& c) {
    Metrics m;
    m.confusion = c;
    const double tp = static_cast<double>(c.tp);
    m.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

Metrics evaluate(const GbdtModel& model, const Table& x, std::span<const int> y) {
    if (x.rows() != y.size()) {
        throw AlignmentError("test features and labels differ in length");
    }
    Confusion c;
    for (std::size_t r = 0; r < y.size(); ++r) {
        const bool predicted = model.predict_proba(x, r) >= 0.5;
        if (predicted && y[r]) ++c.tp;
        else if (predicted) ++c.fp;
        else if (y[r]) ++c.fn;
        else ++c.tn;
    }
    return metrics_from_confusion(c);
}

std::vector<FeatureImportance> feature_importance(const GbdtModel& model) {
    const auto gains = split_gain_importance(model);
    std::vector<FeatureImportance> out;
    for (std::size_t f = 0; f < gains.size(); ++f) {
        out.push_back({model.feature_names[f], gains[f]});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.gain > b.gain || (a.gain == b.gain && a.name < b.name);
    });
    return out;
}

PredictionReport run_protocol(const LabeledDataset& ds, const ExperimentConfig& cfg) {
    return run_experiment(ds, ds, cfg, false);
}

PredictionReport transfer_evaluate(const LabeledDataset& source, const LabeledDataset& target,
                                   const ExperimentConfig& cfg) {
    const bool same_domain = source.domain == target.domain && source.size() == target.size();
    return run_experiment(source, target, cfg, !same_domain);
}

std::vector<SweepPoint> training_fraction_sweep(const LabeledDataset& ds,
                                                std::span<const double> fractions,
                                                const ExperimentConfig& cfg) {
    std::vector<SweepPoint> out;
    for (double q : fractions) {
        if (!(q > 0.0 && q < 1.0)) {
            throw ArgumentError("sweep fractions must lie in (0, 1)");
        }
        ExperimentConfig c = cfg;
        c.q = q;
        const auto r = run_protocol(ds, c);
        SweepPoint pt{q, r.precision, r.recall, r.f1, {}};
        for (const auto& run : r.runs) {
            pt.run_f1.push_back(run.metrics.f1);
        }
        out.push_back(std::move(pt));
    }
    return out;
}

void to_json(nlohmann::ordered_json& j, const ExperimentConfig& c) {
    j = {{"score", to_string(c.score)}, {"p", c.p},           {"q", c.q},
         {"feature_mode", to_string(c.feature_mode)},        {"seed", c.seed},
         {"budget", c.budget},           {"runs", c.runs}};
}

void from_json(const nlohmann::ordered_json& j, ExperimentConfig& c) {
    c.score = score_kind_from_string(j.value("score", std::string(to_string(c.score))));
    c.p = j.value("p", c.p);
    c.q = j.value("q", c.q);
    c.feature_mode =
        feature_mode_from_string(j.value("feature_mode", std::string(to_string(c.feature_mode))));
    c.seed = j.value("seed", c.seed);
    c.budget = j.value("budget", c.budget);
    c.runs = j.value("runs", c.runs);
}

void to_json(nlohmann::ordered_json& j, const PredictionReport& r) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& run : r.runs) {
        const auto& c = run.metrics.confusion;
        runs.push_back({{"seed", run.seed},
                        {"precision", run.metrics.precision},
                        {"recall", run.metrics.recall},
                        {"f1", run.metrics.f1},
                        {"tp", c.tp},
                        {"fp", c.fp},
                        {"fn", c.fn},
                        {"tn", c.tn},
                        {"tune_loss", run.tune_loss},
                        {"hyperparams", run.hyperparams}});
    }
    nlohmann::ordered_json imp = nlohmann::ordered_json::array();
    for (const auto& f : r.feature_importance) {
        imp.push_back({{"feature", f.name}, {"gain", f.gain}});
    }
    j = {{"precision", r.precision},
         {"recall", r.recall},
         {"f1", r.f1},
         {"runs", runs},
         {"feature_importance", imp},
         {"metadata",
          {{"config", r.config},
           {"score", r.score_name},
           {"feature_set", r.feature_set},
           {"source_domain", r.source_domain},
           {"target_domain", r.target_domain}}}};
}

void write_report_json(const PredictionReport& r, const std::filesystem::path& path) {
    Json j = r;
    write_json_file(j, path);
}

void write_report_csv(const PredictionReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "source_domain,target_domain,score,feature_set,p,q,runs,precision,recall,f1\n";
    out << r.source_domain << ',' << r.target_domain << ',' << r.score_name << ','
        << r.feature_set << ',' << format_real(r.config.p) << ',' << format_real(r.config.q) << ','
        << r.runs.size() << ',' << format_real(r.precision) << ',' << format_real(r.recall) << ','
        << format_real(r.f1) << '\n';
}

void write_sweep_csv(std::span<const SweepPoint> points, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "train_fraction,precision,recall,f1,runs\n";
    for (const auto& pt : points) {
        out << format_real(pt.q) << ',' << format_real(pt.precision) << ','
            << format_real(pt.recall) << ',' << format_real(pt.f1) << ',' << pt.run_f1.size()
            << '\n';
    }
}

} // namespace brokerid
