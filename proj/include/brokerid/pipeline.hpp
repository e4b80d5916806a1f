#pragma once

#include "brokerid/config_io.hpp"
#include "brokerid/embedding.hpp"
#include "brokerid/predictor.hpp"
#include "brokerid/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace brokerid {

/// Everything a pipeline run needs. Per-stage seeds are derived from `seed`
/// and the stage name, so the synth and experiment configs carry no seeds of
/// their own here.
struct RunConfig {
    std::string graph;     // edge list; filled in by the synth stage when empty
    std::string cascades;  // cascade JSONL
    std::string out = "out";
    std::uint64_t seed = 1;
    int threads = 0;       // 0 = runtime default
    bool strict = true;    // unknown cascade users are an error
    bool dedup = true;

    SynthConfig synth;
    EmbedConfig embed;
    ExperimentConfig experiment;

    bool centrality_long = false; // also write the `user,measure,value` layout
    double overlap_p = 10.0;
    std::string eligible = "all"; // "all" or "active"
    std::vector<double> sweep_fractions{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};

    std::string transfer_graph;     // target domain for the transfer stage
    std::string transfer_cascades;
    std::string embed_definitions;  // evaluate these recipes instead of learning
    std::string model;              // evaluate this model instead of running the protocol

    bool operator==(const RunConfig& o) const;
};

void to_json(Json& j, const RunConfig& c);
void from_json(const Json& j, RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

/// Stage names in their canonical order.
const std::vector<std::string>& all_stages();
/// The default `pipeline` stage list: synth when no graph is configured, else ingest.
std::vector<std::string> default_stages(const RunConfig& cfg);

std::uint64_t stage_seed(const RunConfig& cfg, std::string_view stage);

struct ArtifactFile {
    std::string path; // relative to the output directory
    std::string sha256;
};

struct StageRecord {
    std::string name;
    std::string status; // "ok" or "failed"
    std::uint64_t seed = 0;
    double seconds = 0.0;
    std::vector<ArtifactFile> files;
    std::string error;
};

struct Manifest {
    Json config;
    Json inputs;
    std::vector<StageRecord> stages;
    std::string failed_stage;

    bool ok() const { return failed_stage.empty(); }
};

/// Runs `stages` in order, writing each stage's files plus `config.json` and
/// `manifest.json` under `cfg.out`. Stops at the first failing stage. Returns 0
/// when every stage succeeded, 1 otherwise.
int run_pipeline(const RunConfig& cfg, std::span<const std::string> stages,
                 Manifest* manifest = nullptr);

std::string sha256_file(const std::filesystem::path& path);

} // namespace brokerid
