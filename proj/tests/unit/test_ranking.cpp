#include "brokerid/errors.hpp"
#include "brokerid/ranking.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace brokerid;

TEST(Ranking, CountUsesCeiling) {
    EXPECT_EQ(top_p_count(10, 100), 10u);
    EXPECT_EQ(top_p_count(10, 101), 11u);
    EXPECT_EQ(top_p_count(10, 5), 1u);
    EXPECT_EQ(top_p_count(100, 7), 7u);
}

TEST(Ranking, TiesGoToLowerIndex) {
    const std::vector<double> zeros(20, 0.0);
    const auto t = top_p_set(zeros, 10);
    EXPECT_EQ(t.members, (std::vector<NodeId>{0, 1}));
    EXPECT_EQ(t.cutoff_rank, 2u);
}

TEST(Ranking, MatchesSortOracle) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> v(0, 30);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(1 + trial * 7);
        for (auto& x : s) {
            x = v(rng);
        }
        for (double p : {1.0, 10.0, 33.3, 100.0}) {
            EXPECT_EQ(top_p_set(s, p).members, oracle::sort_top_p(s, p));
        }
    }
}

TEST(Ranking, InvalidArguments) {
    const std::vector<double> s{1, 2, 3};
    EXPECT_THROW(top_p_set(s, 0), ArgumentError);
    EXPECT_THROW(top_p_set(s, 101), ArgumentError);
    EXPECT_THROW(top_p_set(std::vector<double>{}, 10), ArgumentError);
}

TEST(Ranking, EligibleRestriction) {
    const std::vector<double> s{9, 8, 7, 6, 5};
    const std::vector<NodeId> eligible{1, 3, 4};
    const auto t = top_p_set(s, 40, eligible);
    EXPECT_EQ(t.members, (std::vector<NodeId>{1, 3}));
    EXPECT_EQ(t.eligible, eligible);
}

TEST(Ranking, OverlapIdentities) {
    const std::vector<double> a{5, 4, 3, 2, 1, 0, 0, 0, 0, 0};
    const std::vector<double> b{0, 0, 0, 0, 0, 1, 2, 3, 4, 5};
    const auto ta = top_p_set(a, 20);
    const auto tb = top_p_set(b, 20);
    EXPECT_EQ(overlap_p(ta, ta), 1.0);
    EXPECT_EQ(overlap_p(ta, tb), 0.0);
    EXPECT_THROW(overlap_p(ta, top_p_set(b, 30)), ArgumentError);
    const std::vector<NodeId> some{0, 1, 2, 3, 4};
    EXPECT_THROW(overlap_p(ta, top_p_set(b, 20, some)), ArgumentError);
}

TEST(Ranking, MonotoneTransformInvariance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 10);
    std::vector<NamedScores> plain, warped;
    for (int k = 0; k < 4; ++k) {
        NamedScores s{"s" + std::to_string(k), std::vector<double>(200)};
        for (auto& x : s.values) {
            x = std::floor(u(rng));
        }
        NamedScores w{s.name, s.values};
        for (auto& x : w.values) {
            x = std::exp(0.5 * x) + 3.0;
        }
        plain.push_back(std::move(s));
        warped.push_back(std::move(w));
    }
    const auto m1 = overlap_matrix(plain, 10);
    const auto m2 = overlap_matrix(warped, 10);
    EXPECT_EQ(m1.values, m2.values);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(top_p_set(plain[i].values, 10).members, top_p_set(warped[i].values, 10).members);
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(m1.values[i][j], m1.values[j][i]);
        }
    }
}

TEST(Ranking, ActiveNodes) {
    std::vector<Cascade> cs{{0, 2, 0, {{4, 1}}}, {1, 2, 0, {}}};
    const CascadeSet d(6, cs);
    EXPECT_EQ(cascade_active_nodes(d), (std::vector<NodeId>{2, 4}));
}
