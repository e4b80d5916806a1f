#include "brokerid/pipeline.hpp"

#include "brokerid/errors.hpp"
#include "brokerid/influence.hpp"
#include "brokerid/parallel.hpp"
#include "brokerid/ranking.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>

namespace brokerid {

namespace fs = std::filesystem;

namespace {

void synth_to_json(Json& j, const SynthConfig& s) {
    j = Json{{"nodes", s.nodes},
             {"attachment_edges", s.attachment_edges},
             {"cascade_count", s.cascade_count},
             {"edge_activation_prob", s.edge_activation_prob},
             {"planted_brokers", s.planted_brokers}};
}

void synth_from_json(const Json& j, SynthConfig& s) {
    s.nodes = j.value("nodes", s.nodes);
    s.attachment_edges = j.value("attachment_edges", s.attachment_edges);
    s.cascade_count = j.value("cascade_count", s.cascade_count);
    s.edge_activation_prob = j.value("edge_activation_prob", s.edge_activation_prob);
    s.planted_brokers = j.value("planted_brokers", s.planted_brokers);
}

} // namespace

void to_json(Json& j, const RunConfig& c) {
    Json synth, experiment = c.experiment;
    synth_to_json(synth, c.synth);
    experiment.erase("seed");
    j = Json{{"graph", c.graph},
             {"cascades", c.cascades},
             {"out", c.out},
             {"seed", c.seed},
             {"threads", c.threads},
             {"strict", c.strict},
             {"dedup", c.dedup},
             {"synth", synth},
             {"embed", c.embed},
             {"experiment", experiment},
             {"centrality_long", c.centrality_long},
             {"overlap_p", c.overlap_p},
             {"eligible", c.eligible},
             {"sweep_fractions", c.sweep_fractions},
             {"transfer_graph", c.transfer_graph},
             {"transfer_cascades", c.transfer_cascades},
             {"embed_definitions", c.embed_definitions},
             {"model", c.model}};
}

void from_json(const Json& j, RunConfig& c) {
    c.graph = j.value("graph", c.graph);
    c.cascades = j.value("cascades", c.cascades);
    c.out = j.value("out", c.out);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.strict = j.value("strict", c.strict);
    c.dedup = j.value("dedup", c.dedup);
    if (j.contains("synth")) synth_from_json(j.at("synth"), c.synth);
    if (j.contains("embed")) c.embed = j.at("embed").get<EmbedConfig>();
    if (j.contains("experiment")) c.experiment = j.at("experiment").get<ExperimentConfig>();
    c.centrality_long = j.value("centrality_long", c.centrality_long);
    c.overlap_p = j.value("overlap_p", c.overlap_p);
    c.eligible = j.value("eligible", c.eligible);
    c.sweep_fractions = j.value("sweep_fractions", c.sweep_fractions);
    c.transfer_graph = j.value("transfer_graph", c.transfer_graph);
    c.transfer_cascades = j.value("transfer_cascades", c.transfer_cascades);
    c.embed_definitions = j.value("embed_definitions", c.embed_definitions);
    c.model = j.value("model", c.model);
}

bool RunConfig::operator==(const RunConfig& o) const {
    Json a = *this, b = o;
    return a == b;
}

RunConfig load_run_config(const fs::path& path) {
    try {
        return read_json_file(path).get<RunConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

const std::vector<std::string>& all_stages() {
    static const std::vector<std::string> stages{"synth",   "ingest", "scores",   "centrality",
                                                 "embed",   "overlap", "label",   "train",
                                                 "evaluate", "transfer", "sweep"};
    return stages;
}

std::vector<std::string> default_stages(const RunConfig& cfg) {
    std::vector<std::string> s;
    s.push_back(cfg.graph.empty() ? "synth" : "ingest");
    for (const char* name : {"scores", "centrality", "embed", "overlap", "label", "train",
                             "evaluate", "sweep"}) {
        s.emplace_back(name);
    }
    if (!cfg.transfer_graph.empty()) {
        s.insert(s.end() - 1, "transfer");
    }
    return s;
}

std::uint64_t stage_seed(const RunConfig& cfg, std::string_view stage) {
    return derive_seed(cfg.seed, std::string(stage).c_str());
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot hash " + path.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

namespace {

/// Lazily loaded state shared by the stages of one run. Anything not produced
/// in this run is read back from the output directory.
class Context {
public:
    explicit Context(RunConfig cfg) : cfg_(std::move(cfg)), out_(cfg_.out) {
        // A previous synth run in the same output directory stands in for unset inputs.
        if (cfg_.graph.empty() && fs::exists(out_ / "graph.tsv")) {
            cfg_.graph = (out_ / "graph.tsv").string();
        }
        if (cfg_.cascades.empty() && fs::exists(out_ / "cascades.jsonl")) {
            cfg_.cascades = (out_ / "cascades.jsonl").string();
        }
    }

    RunConfig& cfg() { return cfg_; }
    const fs::path& out() const { return out_; }
    Json& inputs() { return inputs_; }

    const SocialGraph& graph() {
        if (!graph_) {
            if (cfg_.graph.empty()) {
                throw DependencyError("no graph configured; run stage 'synth' first or set graph");
            }
            if (!fs::exists(cfg_.graph)) {
                throw DependencyError("graph file '" + cfg_.graph + "' does not exist");
            }
            graph_ = load_edge_list(cfg_.graph, cfg_.dedup);
            inputs_["graph"] = Json{{"path", cfg_.graph}, {"sha256", sha256_file(cfg_.graph)}};
        }
        return *graph_;
    }

    const CascadeSet& cascades() {
        if (!cascades_) {
            const auto& g = graph();
            if (cfg_.cascades.empty() || !fs::exists(cfg_.cascades)) {
                throw DependencyError("cascade file missing; run stage 'synth' first or set cascades");
            }
            cascades_ = load_cascades(cfg_.cascades, g, cfg_.strict);
            inputs_["cascades"] =
                Json{{"path", cfg_.cascades}, {"sha256", sha256_file(cfg_.cascades)}};
        }
        return *cascades_;
    }

    const InfluenceTable& scores() {
        if (!scores_) {
            const auto path = out_ / "scores.csv";
            if (!fs::exists(path)) {
                throw DependencyError("scores missing; run stage 'scores' first");
            }
            scores_ = read_influence_csv(path, graph());
        }
        return *scores_;
    }

    const std::vector<CentralityVector>& centrality() {
        if (!centrality_) {
            const auto path = out_ / "centrality.csv";
            if (!fs::exists(path)) {
                throw DependencyError("centrality missing; run stage 'centrality' first");
            }
            centrality_ = read_centrality_csv(path, graph(), cfg_.embed.centrality.orientation);
        }
        return *centrality_;
    }

    const FeatureMatrix& features() {
        if (!features_) {
            const auto path = out_ / "definitions.json";
            if (!fs::exists(path)) {
                throw DependencyError("embedding missing; run stage 'embed' first");
            }
            EmbedConfig stored = cfg_.embed;
            const auto defs = read_definitions_json(path, &stored);
            features_ = transfer_features(defs, graph(), stored, cached_centrality());
        }
        return *features_;
    }

    std::span<const CentralityVector> cached_centrality() {
        if (!centrality_ && fs::exists(out_ / "centrality.csv")) {
            centrality();
        }
        return centrality_ ? std::span<const CentralityVector>(*centrality_)
                           : std::span<const CentralityVector>();
    }

    Table feature_table(FeatureMode mode) {
        if (mode == FeatureMode::embedding) {
            return embedding_table(features());
        }
        Table t;
        const auto& cols = centrality();
        for (Measure m : cfg_.embed.base_features) {
            auto it = std::find_if(cols.begin(), cols.end(),
                                   [m](const CentralityVector& cv) { return cv.measure == m; });
            if (it == cols.end()) {
                throw DependencyError(std::string("centrality artifact lacks ") + to_string(m));
            }
            t.names.emplace_back(to_string(m));
            t.columns.push_back(it->values);
        }
        return t;
    }

    LabeledDataset dataset(const std::string& domain = "source") {
        const auto& e = cfg_.experiment;
        const auto scores = score_column(this->scores(), e.score);
        return make_dataset(feature_table(e.feature_mode), scores, e.p, to_string(e.score),
                            to_string(e.feature_mode), domain);
    }

    void set_graph(SocialGraph g) { graph_ = std::move(g); }
    void set_cascades(CascadeSet d) { cascades_ = std::move(d); }
    void set_scores(InfluenceTable t) { scores_ = std::move(t); }
    void set_centrality(std::vector<CentralityVector> c) { centrality_ = std::move(c); }
    void set_features(FeatureMatrix fm) { features_ = std::move(fm); }

private:
    RunConfig cfg_;
    fs::path out_;
    Json inputs_ = Json::object();
    std::optional<SocialGraph> graph_;
    std::optional<CascadeSet> cascades_;
    std::optional<InfluenceTable> scores_;
    std::optional<std::vector<CentralityVector>> centrality_;
    std::optional<FeatureMatrix> features_;
};

CentralityOptions centrality_options(const RunConfig& cfg) {
    CentralityOptions o = cfg.embed.centrality;
    o.betweenness.seed = stage_seed(cfg, "centrality");
    return o;
}

std::vector<CentralityVector> all_centralities(const SocialGraph& g, const CentralityOptions& o) {
    std::vector<CentralityVector> cols;
    for (Measure m : {Measure::in_degree, Measure::out_degree, Measure::total_degree,
                      Measure::closeness, Measure::betweenness, Measure::pagerank,
                      Measure::kcore}) {
        cols.push_back(compute_centrality(g, m, o));
    }
    return cols;
}

ExperimentConfig experiment_for(const RunConfig& cfg, std::string_view stage) {
    ExperimentConfig e = cfg.experiment;
    e.seed = stage_seed(cfg, stage);
    return e;
}

using StageFn = std::function<std::vector<std::string>(Context&, std::uint64_t seed)>;

std::vector<std::string> stage_synth(Context& ctx, std::uint64_t seed) {
    SynthConfig sc = ctx.cfg().synth;
    sc.seed = seed;
    auto g = gen_graph(sc);
    auto d = gen_cascades(g, sc);
    write_edge_list(g, ctx.out() / "graph.tsv");
    write_cascades(d, g, ctx.out() / "cascades.jsonl");
    ctx.cfg().graph = (ctx.out() / "graph.tsv").string();
    ctx.cfg().cascades = (ctx.out() / "cascades.jsonl").string();
    // Reload through the public readers so inputs are hashed and label order is canonical.
    ctx.graph();
    ctx.cascades();
    return {"graph.tsv", "cascades.jsonl"};
}

std::vector<std::string> stage_ingest(Context& ctx, std::uint64_t) {
    const auto& g = ctx.graph();
    const auto& d = ctx.cascades();
    std::size_t events = 0;
    for (const auto& c : d.cascades()) {
        events += c.size();
    }
    Json j{{"nodes", g.node_count()},
           {"edges", g.edge_count()},
           {"cascades", d.size()},
           {"events", events},
           {"active_nodes", cascade_active_nodes(d).size()}};
    write_json_file(j, ctx.out() / "ingest.json");
    return {"ingest.json"};
}

std::vector<std::string> stage_scores(Context& ctx, std::uint64_t) {
    auto t = build_influence_table(ctx.cascades());
    write_influence_csv(t, ctx.graph(), ctx.out() / "scores.csv");
    ctx.set_scores(std::move(t));
    return {"scores.csv"};
}

std::vector<std::string> stage_centrality(Context& ctx, std::uint64_t) {
    auto cols = all_centralities(ctx.graph(), centrality_options(ctx.cfg()));
    write_centrality_csv(cols, ctx.graph(), ctx.out() / "centrality.csv");
    std::vector<std::string> files{"centrality.csv"};
    if (ctx.cfg().centrality_long) {
        write_centrality_long_csv(cols, ctx.graph(), ctx.out() / "centrality_long.csv");
        files.emplace_back("centrality_long.csv");
    }
    ctx.set_centrality(std::move(cols));
    return files;
}

std::vector<std::string> stage_embed(Context& ctx, std::uint64_t) {
    EmbedConfig ec = ctx.cfg().embed;
    ec.centrality = centrality_options(ctx.cfg());
    FeatureMatrix fm;
    if (!ctx.cfg().embed_definitions.empty()) {
        EmbedConfig stored = ec;
        const auto defs = read_definitions_json(ctx.cfg().embed_definitions, &stored);
        stored.centrality.betweenness.seed = ec.centrality.betweenness.seed;
        fm = transfer_features(defs, ctx.graph(), stored, ctx.cached_centrality());
        ec = stored;
    } else {
        fm = learn_features(ctx.graph(), ec, ctx.cached_centrality());
    }
    write_features_csv(fm, ctx.graph(), ctx.out() / "features.csv");
    write_definitions_json(fm, ec, ctx.out() / "definitions.json");
    ctx.set_features(std::move(fm));
    return {"features.csv", "definitions.json"};
}

std::vector<std::string> stage_overlap(Context& ctx, std::uint64_t) {
    const auto& t = ctx.scores();
    std::vector<NamedScores> maps;
    maps.push_back({"source", score_column(t, ScoreKind::source)});
    maps.push_back({"broker", score_column(t, ScoreKind::broker)});
    for (const auto& cv : ctx.centrality()) {
        if (cv.measure == Measure::in_degree || cv.measure == Measure::out_degree) {
            continue;
        }
        maps.push_back({cv.measure == Measure::total_degree ? "degree" : to_string(cv.measure),
                        cv.values});
    }
    std::vector<NodeId> eligible;
    if (ctx.cfg().eligible == "active") {
        eligible = cascade_active_nodes(ctx.cascades());
    } else if (ctx.cfg().eligible == "all") {
        eligible.resize(ctx.graph().node_count());
        std::iota(eligible.begin(), eligible.end(), NodeId{0});
    } else {
        throw ArgumentError("eligible must be 'all' or 'active'");
    }
    const auto m = overlap_matrix(maps, ctx.cfg().overlap_p, eligible);
    write_overlap_csv(m, ctx.out() / "overlap.csv");
    write_overlap_json(m, ctx.out() / "overlap.json");
    return {"overlap.csv", "overlap.json"};
}

std::vector<std::string> stage_label(Context& ctx, std::uint64_t) {
    const auto& e = ctx.cfg().experiment;
    const auto scores = score_column(ctx.scores(), e.score);
    const auto labels = label_top_p(scores, e.p);
    std::ofstream out(ctx.out() / "labels.csv", std::ios::binary);
    out << "user," << to_string(e.score) << "_score,label\n";
    for (NodeId u = 0; u < labels.size(); ++u) {
        out << ctx.graph().label(u) << ',' << format_real(scores[u]) << ',' << labels[u] << '\n';
    }
    return {"labels.csv"};
}

std::vector<std::string> stage_train(Context& ctx, std::uint64_t seed) {
    const auto ds = ctx.dataset();
    const auto& e = ctx.cfg().experiment;
    const Split split = split_and_downsample(ds, SplitSpec{e.q, 0.2, seed});
    const TrainResult tr = train(ds, split, e.budget, derive_seed(seed, "search"), e.space);
    write_json_file(Json(tr.model), ctx.out() / "model.json");
    Json trials = Json::array();
    for (const auto& t : tr.trials) {
        trials.push_back({{"hyperparams", t.hyperparams}, {"tune_loss", t.tune_loss}});
    }
    Json info{{"split_seed", seed},
              {"train_rows", split.train.size()},
              {"tune_rows", split.tune.size()},
              {"test_rows", split.test.size()},
              {"best_trial", tr.best},
              {"trials", trials},
              {"warnings", tr.warnings}};
    for (const auto& w : tr.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    write_json_file(info, ctx.out() / "train.json");
    return {"model.json", "train.json"};
}

std::vector<std::string> stage_evaluate(Context& ctx, std::uint64_t seed) {
    const auto ds = ctx.dataset();
    if (!ctx.cfg().model.empty()) {
        // Score a saved model on the test side of the split it was trained with.
        const Json mj = read_json_file(ctx.cfg().model);
        const auto model = mj.get<GbdtModel>();
        if (model.feature_names != ds.features.names) {
            throw AlignmentError("model features do not match the dataset columns");
        }
        std::uint64_t split_seed = stage_seed(ctx.cfg(), "train");
        const auto info_path = fs::path(ctx.cfg().model).parent_path() / "train.json";
        if (fs::exists(info_path)) {
            split_seed = read_json_file(info_path).value("split_seed", split_seed);
        }
        const Split split =
            split_and_downsample(ds, SplitSpec{ctx.cfg().experiment.q, 0.2, split_seed});
        std::vector<int> y;
        for (auto r : split.test) {
            y.push_back(ds.labels[r]);
        }
        const auto m = evaluate(model, ds.features.select_rows(split.test), y);
        PredictionReport r;
        r.runs.push_back({split_seed, m, model.hyperparams, 0.0});
        r.precision = m.precision;
        r.recall = m.recall;
        r.f1 = m.f1;
        r.feature_importance = feature_importance(model);
        r.config = experiment_for(ctx.cfg(), "evaluate");
        r.config.runs = 1;
        r.score_name = ds.score_name;
        r.feature_set = ds.feature_set;
        r.source_domain = r.target_domain = ds.domain;
        write_report_json(r, ctx.out() / "report.json");
        write_report_csv(r, ctx.out() / "report.csv");
        return {"report.json", "report.csv"};
    }
    (void)seed;
    const auto r = run_protocol(ds, experiment_for(ctx.cfg(), "evaluate"));
    write_report_json(r, ctx.out() / "report.json");
    write_report_csv(r, ctx.out() / "report.csv");
    return {"report.json", "report.csv"};
}

std::vector<std::string> stage_transfer(Context& ctx, std::uint64_t) {
    const auto& cfg = ctx.cfg();
    if (cfg.transfer_graph.empty() || cfg.transfer_cascades.empty()) {
        throw DependencyError("transfer needs transfer_graph and transfer_cascades");
    }
    const auto source = ctx.dataset("source");
    const auto tg = load_edge_list(cfg.transfer_graph, cfg.dedup);
    const auto td = load_cascades(cfg.transfer_cascades, tg, cfg.strict);
    ctx.inputs()["transfer_graph"] =
        Json{{"path", cfg.transfer_graph}, {"sha256", sha256_file(cfg.transfer_graph)}};
    ctx.inputs()["transfer_cascades"] =
        Json{{"path", cfg.transfer_cascades}, {"sha256", sha256_file(cfg.transfer_cascades)}};
    const auto tscores = score_column(build_influence_table(td), cfg.experiment.score);
    EmbedConfig ec = cfg.embed;
    ec.centrality = centrality_options(cfg);
    Table tx;
    if (cfg.experiment.feature_mode == FeatureMode::embedding) {
        tx = embedding_table(transfer_features(ctx.features().definitions, tg, ec));
    } else {
        tx = centrality_table(tg, ec);
    }
    const auto target = make_dataset(std::move(tx), tscores, cfg.experiment.p, source.score_name,
                                     source.feature_set, "target");
    const auto r = transfer_evaluate(source, target, experiment_for(cfg, "transfer"));
    write_report_json(r, ctx.out() / "transfer_report.json");
    write_report_csv(r, ctx.out() / "transfer_report.csv");
    return {"transfer_report.json", "transfer_report.csv"};
}

std::vector<std::string> stage_sweep(Context& ctx, std::uint64_t) {
    const auto ds = ctx.dataset();
    const auto pts =
        training_fraction_sweep(ds, ctx.cfg().sweep_fractions, experiment_for(ctx.cfg(), "sweep"));
    write_sweep_csv(pts, ctx.out() / "sweep.csv");
    return {"sweep.csv"};
}

const std::map<std::string, StageFn>& stage_table() {
    static const std::map<std::string, StageFn> table{
        {"synth", stage_synth},       {"ingest", stage_ingest},   {"scores", stage_scores},
        {"centrality", stage_centrality}, {"embed", stage_embed}, {"overlap", stage_overlap},
        {"label", stage_label},       {"train", stage_train},     {"evaluate", stage_evaluate},
        {"transfer", stage_transfer}, {"sweep", stage_sweep}};
    return table;
}

} // namespace

int run_pipeline(const RunConfig& cfg, std::span<const std::string> stages, Manifest* manifest) {
    Manifest local;
    Manifest& m = manifest ? *manifest : local;
    m = Manifest{};
    fs::create_directories(cfg.out);
    if (cfg.threads > 0) {
        set_num_threads(cfg.threads);
    }
    Context ctx(cfg);
    for (const auto& name : stages) {
        StageRecord rec;
        rec.name = name;
        rec.seed = stage_seed(cfg, name);
        const auto start = std::chrono::steady_clock::now();
        try {
            auto it = stage_table().find(name);
            if (it == stage_table().end()) {
                throw ArgumentError("unknown stage '" + name + "'");
            }
            for (const auto& file : it->second(ctx, rec.seed)) {
                rec.files.push_back({file, sha256_file(ctx.out() / file)});
            }
            rec.status = "ok";
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.error = e.what();
            m.failed_stage = name;
            std::cerr << "stage '" << name << "' failed: " << e.what() << '\n';
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m.stages.push_back(std::move(rec));
        if (!m.ok()) {
            break;
        }
    }

    m.config = ctx.cfg();
    m.inputs = ctx.inputs();
    write_json_file(m.config, ctx.out() / "config.json");
    // Records from earlier invocations in this directory are kept unless the
    // stage ran again.
    Json stages_json = Json::array();
    const auto manifest_path = ctx.out() / "manifest.json";
    if (fs::exists(manifest_path)) {
        try {
            const Json prev = read_json_file(manifest_path);
            for (const auto& rec : prev.at("artifacts")) {
                const auto name = rec.at("stage").get<std::string>();
                const bool rerun = std::any_of(m.stages.begin(), m.stages.end(),
                                               [&](const StageRecord& s) { return s.name == name; });
                if (!rerun) {
                    stages_json.push_back(rec);
                }
            }
        } catch (const std::exception&) {
            stages_json = Json::array();
        }
    }
    for (const auto& s : m.stages) {
        Json files = Json::array();
        for (const auto& f : s.files) {
            files.push_back({{"path", f.path}, {"sha256", f.sha256}});
        }
        Json rec{{"stage", s.name},   {"status", s.status}, {"seed", s.seed},
                 {"seconds", s.seconds}, {"files", files}};
        if (!s.error.empty()) {
            rec["error"] = s.error;
        }
        stages_json.push_back(std::move(rec));
    }
    Json mj{{"status", m.ok() ? "ok" : "failed"},
            {"failed_stage", m.failed_stage},
            {"config", m.config},
            {"inputs", m.inputs},
            {"artifacts", stages_json}};
    write_json_file(mj, manifest_path);
    return m.ok() ? 0 : 1;
}

} // namespace brokerid
