// End-to-end acceptance checks. Prints one line per criterion and exits
// non-zero when any gating criterion fails. Criterion 6 is informational.
//
//   acceptance_tests [--workdir DIR] [--only N[,N...]]

#include "brokerid/centrality.hpp"
#include "brokerid/config_io.hpp"
#include "brokerid/embedding.hpp"
#include "brokerid/influence.hpp"
#include "brokerid/pipeline.hpp"
#include "brokerid/predictor.hpp"
#include "brokerid/ranking.hpp"
#include "brokerid/synth.hpp"

#include "oracles.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace brokerid;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool close_all(const std::vector<double>& a, const std::vector<double>& b, double tol,
               double& worst) {
    if (a.size() != b.size()) {
        worst = INFINITY;
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst < tol;
}

// ---------------------------------------------------------------------------

Outcome score_oracles() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    int corpora = 0, mismatches = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t users = 2 + rng() % 99;
        const std::size_t cascades = rng() % 201;
        const auto d = oracle::random_cascades(users, cascades, rng);
        const auto t = build_influence_table(d);
        mismatches += t.source_score != oracle::source_scores(d);
        mismatches += t.broker_score != oracle::broker_scores(d);
        mismatches += t.retweet_count != oracle::retweet_counts(d);
        ++corpora;
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = mismatches == 0 && secs < 10.0;
    o.detail = std::to_string(corpora) + " corpora, " + std::to_string(mismatches) +
               " mismatching score vectors, " + fmt("%.2fs", secs);
    return o;
}

Outcome centrality_oracles() {
    std::mt19937_64 rng(77);
    double bc_err = 0, pr_err = 0, pr_sum_err = 0, cl_err = 0;
    int kcore_bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 9;
        const double density = 0.15 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
        const auto g = oracle::random_graph(n, density, rng);
        const auto adj = oracle::adjacency(g, true);
        close_all(betweenness(g).values, oracle::exhaustive_betweenness(adj), 1e-9, bc_err);
        const auto pr = pagerank(g).values;
        close_all(pr, oracle::dense_pagerank(adj, 0.85), 1e-8, pr_err);
        double s = 0;
        for (double x : pr) {
            s += x;
        }
        pr_sum_err = std::max(pr_sum_err, std::abs(s - 1.0));
        close_all(closeness(g).values, oracle::harmonic_closeness(adj), 1e-12, cl_err);
        kcore_bad += kcore(g).values != oracle::naive_kcore(g);
    }
    Outcome o;
    o.pass = bc_err < 1e-9 && pr_err < 1e-8 && pr_sum_err <= 1e-6 && cl_err < 1e-12 &&
             kcore_bad == 0;
    std::ostringstream ss;
    ss << "100 graphs (n<=9): max|betweenness err|=" << bc_err << " max|pagerank err|=" << pr_err
       << " max|sum-1|=" << pr_sum_err << " max|closeness err|=" << cl_err
       << " kcore mismatches=" << kcore_bad;
    o.detail = ss.str();
    return o;
}

Outcome overlap_identities() {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> v(0, 40);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 20 + trial * 5;
        std::vector<NamedScores> scores, warped;
        for (int k = 0; k < 4; ++k) {
            NamedScores s{"s" + std::to_string(k), std::vector<double>(n)};
            for (auto& x : s.values) {
                x = v(rng);
            }
            NamedScores w{s.name, s.values};
            for (auto& x : w.values) {
                x = std::log1p(x) * 7.0 - 2.0;
            }
            scores.push_back(std::move(s));
            warped.push_back(std::move(w));
        }
        const auto m = overlap_matrix(scores, 10);
        const auto mw = overlap_matrix(warped, 10);
        violations += m.values != mw.values;
        for (std::size_t i = 0; i < 4; ++i) {
            violations += m.values[i][i] != 1.0;
            violations += top_p_set(scores[i].values, 10).members !=
                          top_p_set(warped[i].values, 10).members;
            for (std::size_t j = 0; j < 4; ++j) {
                violations += m.values[i][j] != m.values[j][i];
            }
        }
        // Disjoint sets: reversed rankings over distinct values.
        std::vector<double> up(n), down(n);
        for (std::size_t i = 0; i < n; ++i) {
            up[i] = static_cast<double>(i);
            down[i] = static_cast<double>(n - i);
        }
        violations += overlap_p(top_p_set(up, 10), top_p_set(down, 10)) != 0.0;
    }
    Outcome o;
    o.pass = violations == 0;
    o.detail = "50 trials, " + std::to_string(violations) + " identity violations";
    return o;
}

Outcome embedding_properties() {
    std::mt19937_64 rng(99);
    int op_bad = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = oracle::random_graph(15, 0.15, rng);
        std::vector<double> col(15);
        for (auto& x : col) {
            x = static_cast<double>(rng() % 9) * 0.25;
        }
        for (auto d : {Direction::in, Direction::out, Direction::total}) {
            for (auto s : {Summary::sum, Summary::mean, Summary::max}) {
                op_bad += apply_operator(g, col, d, s) != oracle::naive_operator(g, col, d, s);
            }
        }
    }

    SynthConfig sc;
    sc.nodes = 600;
    sc.seed = 3;
    const auto g = gen_graph(sc);
    EmbedConfig cfg;
    cfg.ego_distance = 3;
    set_num_threads(1);
    const auto a = learn_features(g, cfg);
    set_num_threads(4);
    const auto b = learn_features(g, cfg);
    set_num_threads(0);
    const auto c = learn_features(g, cfg);
    const bool deterministic = a.definitions == b.definitions && a.transformed == b.transformed &&
                               a.raw == b.raw && a.transformed == c.transformed;
    const auto once = prune_features(a, cfg.lambda);
    const bool idempotent = prune_features(once, cfg.lambda).definitions == once.definitions;
    const auto tr = transfer_features(a.definitions, g, cfg);
    const bool transfer_same = tr.definitions == a.definitions && tr.transformed == a.transformed;

    sc.nodes = 1000;
    const auto big = gen_graph(sc);
    const auto t0 = Clock::now();
    const std::vector<FeatureDefinition> deep{
        FeatureDefinition::parse("mean-(mean-(mean-(mean-(betweenness))))")};
    const auto deep_fm = transfer_features(deep, big, EmbedConfig{});
    const double deep_secs = seconds_since(t0);
    bool finite = deep_fm.cols() == 1;
    for (double x : deep_fm.raw[0]) {
        finite &= std::isfinite(x);
    }

    Outcome o;
    o.pass = op_bad == 0 && deterministic && idempotent && transfer_same && finite &&
             deep_secs < 5.0;
    std::ostringstream ss;
    ss << "operator mismatches=" << op_bad << " deterministic=" << deterministic
       << " prune idempotent=" << idempotent << " self-transfer equal=" << transfer_same << " ("
       << a.cols() << " columns) depth-4 recipe on 1000 nodes " << fmt("%.2fs", deep_secs);
    o.detail = ss.str();
    return o;
}

// Shared planted-broker data for criteria 5 and 6.
struct PlantedData {
    LabeledDataset embedding;
    LabeledDataset centrality;
};

SynthConfig planted_config() {
    SynthConfig sc;
    sc.nodes = 5000;
    sc.cascade_count = 2000;
    sc.planted_brokers = 50;
    sc.attachment_edges = 4;
    sc.edge_activation_prob = 0.2;
    sc.seed = 11;
    return sc;
}

EmbedConfig planted_embed() {
    EmbedConfig ec;
    ec.ego_distance = 3;
    return ec;
}

ExperimentConfig planted_experiment() {
    ExperimentConfig ex;
    ex.seed = 7;
    ex.budget = 10;
    ex.runs = 10;
    return ex;
}

PlantedData make_planted() {
    const auto sc = planted_config();
    const auto g = gen_graph(sc);
    const auto d = gen_cascades(g, sc);
    const auto scores = score_column(build_influence_table(d), ScoreKind::broker);
    const auto ec = planted_embed();
    const auto fm = learn_features(g, ec);
    PlantedData pd;
    pd.embedding = make_dataset(embedding_table(fm), scores, 10, "broker", "embedding");
    pd.centrality = make_dataset(centrality_table(g, ec), scores, 10, "broker", "centrality");
    return pd;
}

bool f1_identity(const PredictionReport& r) {
    auto ok = [](double p, double rc, double f) {
        const double want = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
        return std::abs(f - want) < 1e-12;
    };
    for (const auto& run : r.runs) {
        if (!ok(run.metrics.precision, run.metrics.recall, run.metrics.f1)) {
            return false;
        }
    }
    return true;
}

std::optional<PlantedData> g_planted;

const PlantedData& planted() {
    if (!g_planted) {
        g_planted = make_planted();
    }
    return *g_planted;
}

Outcome predictor_sanity() {
    const auto t0 = Clock::now();
    const auto& pd = planted();
    const auto ex = planted_experiment();
    const auto model = run_protocol(pd.embedding, ex);

    auto shuffled = pd.embedding;
    std::mt19937_64 rng(123);
    std::shuffle(shuffled.labels.begin(), shuffled.labels.end(), rng);
    const auto null = run_protocol(shuffled, ex);

    bool balanced = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SplitSpec spec;
        spec.seed = seed;
        const auto s = split_and_downsample(pd.embedding, spec);
        std::size_t pos = 0;
        for (auto r : s.train) {
            pos += pd.embedding.labels[r];
        }
        for (auto r : s.tune) {
            pos += pd.embedding.labels[r];
        }
        balanced &= 2 * pos == s.train.size() + s.tune.size();
    }
    const bool identity = f1_identity(model) && f1_identity(null);
    const double secs = seconds_since(t0);

    Outcome o;
    o.pass = model.f1 >= 0.5 && model.f1 > null.f1 && std::abs(null.precision - 0.1) <= 0.05 &&
             balanced && identity && secs < 180.0;
    std::ostringstream ss;
    ss << "embedding F1=" << fmt("%.3f", model.f1) << " (P=" << fmt("%.3f", model.precision)
       << " R=" << fmt("%.3f", model.recall) << ", " << pd.embedding.features.cols()
       << " features); shuffled-label null F1=" << fmt("%.3f", null.f1)
       << " P=" << fmt("%.3f", null.precision) << "; balanced pools=" << balanced
       << " F1 identity=" << identity << "; " << fmt("%.1fs", secs);
    o.detail = ss.str();
    return o;
}

Outcome paper_shape() {
    const auto& pd = planted();
    auto ex = planted_experiment();
    const auto emb = run_protocol(pd.embedding, ex);
    ex.feature_mode = FeatureMode::centrality;
    const auto cen = run_protocol(pd.centrality, ex);
    ex.feature_mode = FeatureMode::embedding;
    const std::vector<double> fractions{0.05, 0.5};
    const auto sweep = training_fraction_sweep(pd.embedding, fractions, ex);
    const double gap = std::abs(sweep[0].f1 - sweep[1].f1);
    Outcome o;
    o.pass = emb.f1 >= cen.f1 - 0.02 && gap < 0.1;
    std::ostringstream ss;
    ss << "embedding F1=" << fmt("%.3f", emb.f1) << " vs centrality F1=" << fmt("%.3f", cen.f1)
       << "; sweep F1 q=0.05: " << fmt("%.3f", sweep[0].f1) << ", q=0.5: "
       << fmt("%.3f", sweep[1].f1) << " (gap " << fmt("%.3f", gap) << ")";
    o.detail = ss.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Manifest minus wall-clock fields.
std::string manifest_without_times(const fs::path& p) {
    auto j = read_json_file(p);
    for (auto& a : j.at("artifacts")) {
        a.erase("seconds");
    }
    return j.dump();
}

Outcome determinism(const fs::path& work) {
    RunConfig cfg;
    cfg.seed = 31;
    cfg.synth.nodes = 1500;
    cfg.synth.cascade_count = 600;
    cfg.synth.planted_brokers = 15;
    cfg.synth.edge_activation_prob = 0.2;
    cfg.embed.ego_distance = 3;
    cfg.experiment.budget = 4;
    cfg.experiment.runs = 3;
    cfg.sweep_fractions = {0.1, 0.3};
    // Both runs use the same output directory; the first run's files are moved aside.
    const auto a = work / "determinism_first";
    const auto b = work / "determinism";
    fs::remove_all(a);
    fs::remove_all(b);
    cfg.out = b.string();
    const auto stages = default_stages(cfg);
    const int ra = run_pipeline(cfg, stages);
    fs::rename(b, a);
    set_num_threads(2);
    const int rb = run_pipeline(cfg, stages);
    set_num_threads(0);

    int compared = 0, differing = 0;
    std::string first_diff;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        const auto ext = name.extension();
        if (ext != ".csv" && ext != ".json" && ext != ".jsonl" && ext != ".tsv") {
            continue;
        }
        ++compared;
        bool same;
        if (name == "manifest.json") {
            same = manifest_without_times(a / name) == manifest_without_times(b / name);
        } else {
            same = slurp(a / name) == slurp(b / name);
        }
        if (!same) {
            ++differing;
            if (first_diff.empty()) {
                first_diff = name.string();
            }
        }
    }
    Outcome o;
    o.pass = ra == 0 && rb == 0 && compared >= 10 && differing == 0;
    o.detail = std::to_string(stages.size()) + "-stage runs, " + std::to_string(compared) +
               " artifacts compared, " + std::to_string(differing) + " differ" +
               (first_diff.empty() ? "" : " (first: " + first_diff + ")") +
               "; manifests compared without wall times";
    return o;
}

Outcome scale_smoke(const fs::path& work) {
    RunConfig cfg;
    cfg.seed = 8;
    cfg.out = (work / "scale").string();
    fs::remove_all(cfg.out);
    cfg.synth.nodes = 50000;
    cfg.synth.cascade_count = 20000;
    cfg.synth.planted_brokers = 500;
    cfg.synth.edge_activation_prob = 0.1;
    cfg.embed.ego_distance = 3;
    cfg.embed.centrality.betweenness.samples = 256;
    cfg.experiment.budget = 10;
    cfg.experiment.runs = 10;
    const std::vector<std::string> stages{"synth", "scores", "centrality", "embed",
                                          "label", "train",  "evaluate"};
    const auto t0 = Clock::now();
    Manifest m;
    const int rc = run_pipeline(cfg, stages, &m);
    const double secs = seconds_since(t0);
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    const double peak_gb = static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);
    double f1 = -1;
    if (rc == 0) {
        f1 = read_json_file(fs::path(cfg.out) / "report.json").at("f1").get<double>();
    }
    std::ostringstream ss;
    ss << "50000 nodes / 20000 cascades, sampled betweenness, embed depth 3: status "
       << (rc == 0 ? "ok" : "failed at " + m.failed_stage) << ", " << fmt("%.1fs", secs)
       << " on " << num_threads() << " thread(s), peak RSS " << fmt("%.2f GB", peak_gb)
       << ", F1=" << fmt("%.3f", f1) << "; stages:";
    for (const auto& s : m.stages) {
        ss << ' ' << s.name << '=' << fmt("%.1fs", s.seconds);
    }
    Outcome o;
    o.pass = rc == 0 && secs < 600.0 && peak_gb < 4.0;
    o.detail = ss.str();
    return o;
}

} // namespace

int main(int argc, char** argv) {
    fs::path work = fs::temp_directory_path() / "brokerid_acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--workdir" && i + 1 < argc) {
            work = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) {
                only.insert(std::stoi(item));
            }
        } else {
            std::cerr << "usage: acceptance_tests [--workdir DIR] [--only N[,N...]]\n";
            return 2;
        }
    }
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        bool gating;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "score oracle equivalence", true, score_oracles},
        {2, "centrality oracles", true, centrality_oracles},
        {3, "overlap identities", true, overlap_identities},
        {4, "embedding properties", true, embedding_properties},
        {5, "predictor sanity on planted brokers", true, predictor_sanity},
        {6, "directional shape check", false, paper_shape},
        {7, "pipeline determinism", true, [&] { return determinism(work); }},
        {8, "scale smoke test", true, [&] { return scale_smoke(work); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) {
            continue;
        }
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const char* tag = o.pass ? "PASS" : (c.gating ? "FAIL" : "WARN");
        if (!c.gating) {
            tag = o.pass ? "INFO" : "WARN";
        }
        std::cout << tag << " [" << c.id << "] " << c.name << ": " << o.detail << std::endl;
        if (c.gating && !o.pass) {
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
