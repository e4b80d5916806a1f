#pragma once

#include "brokerid/cascade.hpp"
#include "brokerid/graph.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace brokerid {

/// The ceil(p% of eligible) highest-scoring nodes, ties broken by lower index.
struct TopSet {
    std::string score_name;
    double p = 0.0;
    std::vector<NodeId> members;  // ascending node index
    std::size_t cutoff_rank = 0;  // == members.size()
    std::vector<NodeId> eligible; // ascending node index

    bool contains(NodeId v) const;
};

/// Number of members for a p-percent cut of `eligible_count` nodes.
std::size_t top_p_count(double p, std::size_t eligible_count);

/// Throws ArgumentError when p is outside (0, 100] or `eligible` is empty.
TopSet top_p_set(std::span<const double> scores, double p, std::span<const NodeId> eligible,
                 std::string score_name = {});
/// Every node is eligible.
TopSet top_p_set(std::span<const double> scores, double p, std::string score_name = {});

/// |a ∩ b| / |a|. Throws ArgumentError when the sets were cut at different p or
/// over different eligible populations.
double overlap_p(const TopSet& a, const TopSet& b);

struct NamedScores {
    std::string name;
    std::vector<double> values;
};

struct OverlapMatrix {
    std::vector<std::string> names;
    double p = 0.0;
    std::vector<std::vector<double>> values; // values[i][j] = overlap_p(top_i, top_j)
};

OverlapMatrix overlap_matrix(std::span<const NamedScores> scores, double p,
                             std::span<const NodeId> eligible);
OverlapMatrix overlap_matrix(std::span<const NamedScores> scores, double p);

/// Nodes that root or repost at least one cascade, ascending.
std::vector<NodeId> cascade_active_nodes(const CascadeSet& d);

void write_overlap_csv(const OverlapMatrix& m, const std::filesystem::path& path);
void write_overlap_json(const OverlapMatrix& m, const std::filesystem::path& path);

} // namespace brokerid
