#include "brokerid/influence.hpp"
#include "brokerid/serial.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace brokerid;

TEST(Influence, HandExample) {
    // a roots a cascade reposted by b at 1 and c at 2; b reposts d's post at 1, e at 1.
    std::vector<Cascade> cs{{0, 0, 0, {{1, 1}, {2, 2}}}, {1, 3, 0, {{1, 1}, {4, 1}}}};
    const CascadeSet d(5, cs);
    const auto t = build_influence_table(d);
    EXPECT_EQ(t.source_score, (std::vector<std::uint64_t>{2, 0, 0, 2, 0}));
    EXPECT_EQ(t.broker_score, (std::vector<std::uint64_t>{0, 1, 0, 0, 0}));
    EXPECT_EQ(t.retweet_count, (std::vector<std::uint64_t>{0, 2, 1, 0, 1}));
    EXPECT_DOUBLE_EQ(t.broker_per_retweet[1], 0.5);
    EXPECT_DOUBLE_EQ(t.broker_per_retweet[0], 0.0);
}

TEST(Influence, EmptyCorpusGivesZeros) {
    const CascadeSet d(4, {});
    const auto t = build_influence_table(d);
    for (std::size_t u = 0; u < 4; ++u) {
        EXPECT_EQ(t.source_score[u], 0u);
        EXPECT_EQ(t.broker_score[u], 0u);
        EXPECT_EQ(t.broker_per_retweet[u], 0.0);
    }
}

TEST(Influence, UnionNotSumAcrossCascades) {
    std::vector<Cascade> cs{{0, 0, 0, {{1, 1}, {2, 2}}}, {1, 3, 0, {{1, 1}, {2, 2}}}};
    const CascadeSet d(4, cs);
    EXPECT_EQ(broker_scores(d)[1], 1u);
}

TEST(Influence, MatchesSetOracleOnRandomCorpora) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + trial * 3;
        const auto d = oracle::random_cascades(n, 2 * n, rng);
        const auto s = oracle::source_scores(d);
        const auto b = oracle::broker_scores(d);
        EXPECT_EQ(source_spreader_scores(d, Exec::parallel), s);
        EXPECT_EQ(source_spreader_scores(d, Exec::serial), s);
        EXPECT_EQ(broker_scores(d, Exec::parallel), b);
        EXPECT_EQ(broker_scores(d, Exec::serial), b);
        EXPECT_EQ(retweet_counts(d), oracle::retweet_counts(d));
    }
}

TEST(Influence, ThreadCountDoesNotChangeScores) {
    std::mt19937_64 rng(5);
    const auto d = oracle::random_cascades(200, 400, rng);
    set_num_threads(1);
    const auto one = build_influence_table(d);
    set_num_threads(4);
    const auto four = build_influence_table(d);
    set_num_threads(0);
    EXPECT_EQ(one.broker_score, four.broker_score);
    EXPECT_EQ(one.source_score, four.source_score);
}

TEST(Influence, CsvRoundTrip) {
    const auto g = parse_edge_list("a\tb\nb\tc\nc\td\n");
    std::vector<Cascade> cs{{0, 0, 0, {{1, 1}, {2, 2}, {3, 2}}}};
    const CascadeSet d(4, cs);
    const auto t = build_influence_table(d);
    const auto dir = std::filesystem::temp_directory_path() / "brokerid_influence_rt";
    std::filesystem::create_directories(dir);
    write_influence_csv(t, g, dir / "s.csv");
    const auto r = read_influence_csv(dir / "s.csv", g);
    EXPECT_EQ(r.broker_score, t.broker_score);
    EXPECT_EQ(r.source_score, t.source_score);
    EXPECT_EQ(r.broker_per_retweet, t.broker_per_retweet);
}
