#pragma once

#include "brokerid/cascade.hpp"
#include "brokerid/graph.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace brokerid {

struct SynthConfig {
    std::size_t nodes = 2000;
    std::size_t attachment_edges = 4;  // followees chosen by each new node
    std::size_t cascade_count = 1000;
    double edge_activation_prob = 0.1;
    std::size_t planted_brokers = 20;
    std::uint64_t seed = 1;

    /// Throws ArgumentError on out-of-range values.
    void validate() const;
};

/// Directed preferential attachment: node i follows min(m, i) distinct earlier
/// nodes, each drawn with probability proportional to its follower count + 1.
SocialGraph gen_graph(const SynthConfig& cfg);

/// A seeded uniform sample of min(planted_brokers, node_count) nodes, ascending.
std::vector<NodeId> planted_brokers(std::size_t node_count, const SynthConfig& cfg);

/// One independent-cascade run from `root` along followee -> follower edges.
/// Activation time is parent time + 1. A planted node activates with tripled
/// probability and, once active, triples the probability for its followers.
Cascade simulate_cascade(const SocialGraph& g, NodeId root, double activation_prob,
                         const std::vector<bool>& planted, std::mt19937_64& rng);

/// `cascade_count` cascades from random roots (weight = followers + 1), each with its own
/// derived seed; cascade ids are 0..count-1.
CascadeSet gen_cascades(const SocialGraph& g, const SynthConfig& cfg);

} // namespace brokerid
