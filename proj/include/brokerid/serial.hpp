#pragma once

// Single-threaded reference kernels. They share contracts with the OpenMP
// kernels and are kept for cross-checking and benchmarking.

#include "brokerid/cascade.hpp"
#include "brokerid/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace brokerid {
enum class Direction;
enum class Summary;
struct PageRankParams;
} // namespace brokerid

namespace brokerid::serial {

std::vector<std::uint64_t> source_spreader_scores(const CascadeSet& d);
std::vector<std::uint64_t> broker_scores(const CascadeSet& d);

std::vector<double> closeness(const DirectedView& view);
std::vector<double> betweenness(const DirectedView& view, std::span<const NodeId> sources);
std::vector<double> pagerank(const DirectedView& view, const PageRankParams& params);

std::vector<double> apply_operator(const SocialGraph& g, std::span<const double> col,
                                   Direction dir, Summary summary);

} // namespace brokerid::serial
