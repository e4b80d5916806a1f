// Command-line entry point. Every subcommand maps onto one or more pipeline
// stages; flags override fields of the optional --config file.

#include "brokerid/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace brokerid;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out, graph, cascades;
    bool lenient = false;
    bool no_dedup = false;

    // synth
    std::optional<std::size_t> nodes, attachment, cascade_count, planted;
    std::optional<double> activation;
    // centrality / embed
    std::optional<std::string> orientation;
    std::optional<std::size_t> betweenness_samples;
    bool long_format = false;
    std::optional<double> lambda, bin_fraction;
    std::optional<int> ego_distance, bins;
    std::optional<std::string> base_features, transfer_defs;
    // overlap / experiments
    std::optional<double> p, q;
    std::optional<std::string> eligible, score, feature_mode, model, fractions;
    std::optional<int> budget, runs;
    std::optional<std::string> target_graph, target_cascades;
    std::optional<std::string> stages;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON run configuration");
    app->add_option("--seed", f.seed, "Global seed");
    app->add_option("--threads", f.threads, "Worker threads (default: all cores)");
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--graph", f.graph, "Edge list (follower<TAB or ,>followee)");
    app->add_option("--cascades", f.cascades, "Cascade JSONL");
    app->add_flag("--lenient", f.lenient, "Skip cascade users missing from the graph");
    app->add_flag("--no-dedup", f.no_dedup, "Reject duplicate edges and self-loops");
}

void add_synth(CLI::App* app, Flags& f) {
    app->add_option("--nodes", f.nodes);
    app->add_option("--attachment-edges", f.attachment);
    app->add_option("--cascade-count", f.cascade_count);
    app->add_option("--activation-prob", f.activation);
    app->add_option("--planted-brokers", f.planted);
}

void add_centrality(CLI::App* app, Flags& f) {
    app->add_option("--orientation", f.orientation, "information_flow (default) or follow");
    app->add_option("--betweenness-samples", f.betweenness_samples,
                    "Sampled pivots for approximate betweenness (0 = exact)");
}

void add_embed(CLI::App* app, Flags& f) {
    add_centrality(app, f);
    app->add_option("--lambda", f.lambda);
    app->add_option("--ego-distance", f.ego_distance);
    app->add_option("--bins", f.bins);
    app->add_option("--bin-fraction", f.bin_fraction);
    app->add_option("--base-features", f.base_features, "Comma-separated base measures");
}

void add_experiment(CLI::App* app, Flags& f) {
    app->add_option("--score", f.score, "broker or source");
    app->add_option("--p", f.p, "Top-p percent labeled positive");
    app->add_option("--q", f.q, "Training fraction");
    app->add_option("--feature-mode", f.feature_mode, "embedding or centrality");
    app->add_option("--budget", f.budget, "Hyperparameter trials");
    app->add_option("--runs", f.runs, "Repetitions averaged in the report");
}

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.out) c.out = *f.out;
    if (f.graph) c.graph = *f.graph;
    if (f.cascades) c.cascades = *f.cascades;
    if (f.lenient) c.strict = false;
    if (f.no_dedup) c.dedup = false;
    if (f.nodes) c.synth.nodes = *f.nodes;
    if (f.attachment) c.synth.attachment_edges = *f.attachment;
    if (f.cascade_count) c.synth.cascade_count = *f.cascade_count;
    if (f.activation) c.synth.edge_activation_prob = *f.activation;
    if (f.planted) c.synth.planted_brokers = *f.planted;
    if (f.orientation) c.embed.centrality.orientation = orientation_from_string(*f.orientation);
    if (f.betweenness_samples) c.embed.centrality.betweenness.samples = *f.betweenness_samples;
    if (f.long_format) c.centrality_long = true;
    if (f.lambda) c.embed.lambda = *f.lambda;
    if (f.ego_distance) c.embed.ego_distance = *f.ego_distance;
    if (f.bins) c.embed.bins = *f.bins;
    if (f.bin_fraction) c.embed.bin_fraction = *f.bin_fraction;
    if (f.base_features) {
        c.embed.base_features.clear();
        for (const auto& s : split_list(*f.base_features)) {
            c.embed.base_features.push_back(measure_from_string(s));
        }
    }
    if (f.transfer_defs) c.embed_definitions = *f.transfer_defs;
    if (f.p) {
        c.experiment.p = *f.p;
        c.overlap_p = *f.p;
    }
    if (f.q) c.experiment.q = *f.q;
    if (f.eligible) c.eligible = *f.eligible;
    if (f.score) c.experiment.score = score_kind_from_string(*f.score);
    if (f.feature_mode) c.experiment.feature_mode = feature_mode_from_string(*f.feature_mode);
    if (f.budget) c.experiment.budget = *f.budget;
    if (f.runs) c.experiment.runs = *f.runs;
    if (f.model) c.model = *f.model;
    if (f.fractions) {
        c.sweep_fractions.clear();
        for (const auto& s : split_list(*f.fractions)) {
            c.sweep_fractions.push_back(std::stod(s));
        }
    }
    if (f.target_graph) c.transfer_graph = *f.target_graph;
    if (f.target_cascades) c.transfer_cascades = *f.target_cascades;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Influential broker identification from follow graphs and repost cascades"};
    app.require_subcommand(1);
    Flags f;

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"ingest", "Load and validate the graph and cascades"},
        {"synth", "Generate a synthetic follow graph and cascades"},
        {"scores", "Source-spreader, broker and repost scores per user"},
        {"centrality", "Degree, closeness, betweenness, PageRank and k-core"},
        {"embed", "Learn (or transfer) relational feature embeddings"},
        {"overlap", "Top-p overlap matrix between scores and centralities"},
        {"label", "Top-p influencer labels"},
        {"train", "Fit one classifier with hyperparameter search"},
        {"evaluate", "Repeated split/train/evaluate protocol, or score a saved model"},
        {"transfer", "Train on this graph, evaluate on a target graph"},
        {"sweep", "Training-fraction sweep"},
        {"pipeline", "Run several stages in order"},
    };
    std::map<std::string, CLI::App*> apps;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, f);
        apps[s.name] = sub;
    }
    add_synth(apps["synth"], f);
    add_centrality(apps["centrality"], f);
    apps["centrality"]->add_flag("--long", f.long_format, "Also write user,measure,value CSV");
    add_embed(apps["embed"], f);
    apps["embed"]->add_option("--transfer", f.transfer_defs, "Definitions JSON to evaluate");
    apps["overlap"]->add_option("--p", f.p);
    apps["overlap"]->add_option("--eligible", f.eligible, "all or active");
    for (const char* name : {"label", "train", "evaluate", "transfer", "sweep"}) {
        add_experiment(apps[name], f);
    }
    apps["evaluate"]->add_option("--model", f.model, "Saved model.json to score");
    apps["sweep"]->add_option("--fractions", f.fractions, "Comma-separated training fractions");
    apps["transfer"]->add_option("--target-graph", f.target_graph)->required();
    apps["transfer"]->add_option("--target-cascades", f.target_cascades)->required();
    auto* pipe = apps["pipeline"];
    add_synth(pipe, f);
    add_embed(pipe, f);
    add_experiment(pipe, f);
    pipe->add_option("--stages", f.stages, "Comma-separated stage list");
    pipe->add_option("--target-graph", f.target_graph);
    pipe->add_option("--target-cascades", f.target_cascades);

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve(f);
        std::string chosen;
        for (const auto& [name, sub] : apps) {
            if (sub->parsed()) {
                chosen = name;
            }
        }
        std::vector<std::string> stages;
        if (chosen == "pipeline") {
            stages = f.stages ? split_list(*f.stages) : default_stages(cfg);
        } else {
            stages = {chosen};
        }
        Manifest m;
        const int rc = run_pipeline(cfg, stages, &m);
        for (const auto& s : m.stages) {
            std::cout << s.name << ": " << s.status;
            for (const auto& file : s.files) {
                std::cout << ' ' << (std::filesystem::path(cfg.out) / file.path).string();
            }
            std::cout << '\n';
        }
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
