#pragma once

#include "brokerid/cascade.hpp"
#include "brokerid/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace brokerid {

/// Per-node ground-truth influence quantities derived from the cascade corpus.
struct InfluenceTable {
    std::vector<std::uint64_t> source_score;    // distinct users reposting u's own posts
    std::vector<std::uint64_t> broker_score;    // distinct users reposting after u's reposts
    std::vector<std::uint64_t> retweet_count;   // cascades in which u reposted
    std::vector<double> broker_per_retweet;     // broker_score / retweet_count, 0 when no reposts

    std::size_t size() const { return source_score.size(); }
};

/// |union of event users over cascades rooted at u| for every node.
std::vector<std::uint64_t> source_spreader_scores(const CascadeSet& d, Exec exec = Exec::parallel);

/// |union over all cascades of users strictly later than u| for every node.
std::vector<std::uint64_t> broker_scores(const CascadeSet& d, Exec exec = Exec::parallel);

std::vector<std::uint64_t> retweet_counts(const CascadeSet& d);

InfluenceTable build_influence_table(const CascadeSet& d, Exec exec = Exec::parallel);

/// CSV `user,source_score,broker_score,retweet_count,broker_per_retweet`.
void write_influence_csv(const InfluenceTable& t, const SocialGraph& g,
                         const std::filesystem::path& path);
/// Reads the CSV written above back into node order of `g`.
InfluenceTable read_influence_csv(const std::filesystem::path& path, const SocialGraph& g);

} // namespace brokerid
