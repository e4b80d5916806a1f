#include "brokerid/config_io.hpp"
#include "brokerid/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace brokerid;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_run(const fs::path& out) {
    RunConfig c;
    c.out = out.string();
    c.seed = 5;
    c.synth.nodes = 300;
    c.synth.cascade_count = 150;
    c.synth.edge_activation_prob = 0.2;
    c.synth.planted_brokers = 5;
    c.embed.ego_distance = 2;
    c.experiment.budget = 2;
    c.experiment.runs = 2;
    c.sweep_fractions = {0.2, 0.5};
    return c;
}

} // namespace

TEST(Pipeline, TwoStagesTwoRecords) {
    const auto dir = fresh_dir("brokerid_pipe_two");
    const auto cfg = small_run(dir);
    Manifest m;
    const std::vector<std::string> stages{"synth", "scores"};
    EXPECT_EQ(run_pipeline(cfg, stages, &m), 0);
    EXPECT_EQ(m.stages.size(), 2u);
    const auto j = read_json_file(dir / "manifest.json");
    EXPECT_EQ(j.at("artifacts").size(), 2u);
    EXPECT_EQ(j.at("status"), "ok");
    EXPECT_TRUE(fs::exists(dir / "config.json"));
    EXPECT_EQ(j.at("artifacts")[1].at("files")[0].at("sha256"), sha256_file(dir / "scores.csv"));
}

TEST(Pipeline, RerunIsByteIdentical) {
    const auto a = fresh_dir("brokerid_pipe_a");
    const auto b = fresh_dir("brokerid_pipe_b");
    const std::vector<std::string> stages{"synth", "scores", "centrality"};
    ASSERT_EQ(run_pipeline(small_run(a), stages), 0);
    ASSERT_EQ(run_pipeline(small_run(b), stages), 0);
    for (const char* f : {"graph.tsv", "cascades.jsonl", "scores.csv", "centrality.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}

TEST(Pipeline, MissingDependencyNamesStage) {
    const auto dir = fresh_dir("brokerid_pipe_dep");
    Manifest m;
    const std::vector<std::string> stages{"label"};
    EXPECT_NE(run_pipeline(small_run(dir), stages, &m), 0);
    EXPECT_EQ(m.failed_stage, "label");
    ASSERT_FALSE(m.stages.empty());
    EXPECT_NE(m.stages.back().error.find("first"), std::string::npos);
    const auto j = read_json_file(dir / "manifest.json");
    EXPECT_EQ(j.at("failed_stage"), "label");
}

TEST(Pipeline, UnknownStageFails) {
    const auto dir = fresh_dir("brokerid_pipe_unknown");
    const std::vector<std::string> stages{"synth", "bogus"};
    EXPECT_NE(run_pipeline(small_run(dir), stages), 0);
}

TEST(Pipeline, StagesChainAcrossInvocations) {
    const auto dir = fresh_dir("brokerid_pipe_chain");
    auto cfg = small_run(dir);
    const std::vector<std::string> first{"synth"};
    ASSERT_EQ(run_pipeline(cfg, first), 0);
    const std::vector<std::string> second{"scores", "centrality"};
    EXPECT_EQ(run_pipeline(cfg, second), 0);
}

TEST(Pipeline, EndToEndDefaultStages) {
    const auto dir = fresh_dir("brokerid_pipe_e2e");
    auto cfg = small_run(dir);
    cfg.synth.nodes = 2000;
    cfg.synth.cascade_count = 600;
    const auto stages = default_stages(cfg);
    EXPECT_EQ(stages.size(), 9u);
    Manifest m;
    ASSERT_EQ(run_pipeline(cfg, stages, &m), 0);
    const auto r = read_json_file(dir / "report.json");
    EXPECT_TRUE(r.contains("f1"));
    EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
    EXPECT_TRUE(fs::exists(dir / "overlap.csv"));
}

TEST(Pipeline, ConfigRoundTrip) {
    auto c = small_run("somewhere");
    c.eligible = "active";
    c.embed.lambda = 0.75;
    c.experiment.feature_mode = FeatureMode::centrality;
    c.sweep_fractions = {0.1, 0.3};
    const auto dir = fresh_dir("brokerid_pipe_cfg");
    fs::create_directories(dir);
    Json j = c;
    write_json_file(j, dir / "run.json");
    const auto back = load_run_config(dir / "run.json");
    EXPECT_TRUE(back == c);
}

TEST(Pipeline, StageSeedsDifferPerStage) {
    const auto c = small_run("x");
    EXPECT_NE(stage_seed(c, "synth"), stage_seed(c, "train"));
    EXPECT_EQ(stage_seed(c, "train"), stage_seed(c, "train"));
}
