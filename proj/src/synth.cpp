#include "brokerid/synth.hpp"

#include "brokerid/errors.hpp"
#include "brokerid/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace brokerid {

void SynthConfig::validate() const {
    if (!(edge_activation_prob >= 0.0 && edge_activation_prob <= 1.0)) {
        throw ArgumentError("edge_activation_prob must lie in [0, 1]");
    }
    if (nodes < attachment_edges + 1) {
        throw ArgumentError("nodes must exceed attachment_edges");
    }
}

SocialGraph gen_graph(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(derive_seed(cfg.seed, "graph"));
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(cfg.nodes * cfg.attachment_edges);
    // Each node sits in the urn once plus once per follower, so a uniform draw
    // is proportional to in-degree + 1.
    std::vector<NodeId> urn;
    urn.reserve(cfg.nodes * (cfg.attachment_edges + 1));
    std::vector<NodeId> picked;
    for (NodeId i = 0; i < cfg.nodes; ++i) {
        const std::size_t want = std::min<std::size_t>(cfg.attachment_edges, i);
        picked.clear();
        if (want == i) {
            for (NodeId j = 0; j < i; ++j) {
                picked.push_back(j);
            }
        } else {
            while (picked.size() < want) {
                std::uniform_int_distribution<std::size_t> draw(0, urn.size() - 1);
                const NodeId v = urn[draw(rng)];
                if (std::find(picked.begin(), picked.end(), v) == picked.end()) {
                    picked.push_back(v);
                }
            }
        }
        for (NodeId v : picked) {
            edges.emplace_back(i, v);
            urn.push_back(v);
        }
        urn.push_back(i);
    }
    std::vector<std::string> labels;
    labels.reserve(cfg.nodes);
    for (std::size_t i = 0; i < cfg.nodes; ++i) {
        labels.push_back("u" + std::to_string(i));
    }
    return SocialGraph::from_edges(cfg.nodes, edges, false, std::move(labels));
}

std::vector<NodeId> planted_brokers(std::size_t node_count, const SynthConfig& cfg) {
    std::vector<NodeId> all(node_count);
    std::iota(all.begin(), all.end(), NodeId{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, "planted"));
    const std::size_t k = std::min(cfg.planted_brokers, node_count);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, node_count - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

Cascade simulate_cascade(const SocialGraph& g, NodeId root, double activation_prob,
                         const std::vector<bool>& planted, std::mt19937_64& rng) {
    Cascade c;
    c.root = root;
    c.root_time = 0;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<NodeId> frontier{root};
    std::vector<Timestamp> times{0};
    std::vector<bool> active(g.node_count(), false);
    active[root] = true;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const NodeId v = frontier[head];
        const Timestamp t = times[head];
        const double spur = planted[v] ? 3.0 : 1.0;
        // Followers of v are its in-neighbors in the follow graph.
        for (NodeId w : g.in_neighbors(v)) {
            if (active[w]) {
                continue;
            }
            const double prob = std::min(1.0, activation_prob * spur * (planted[w] ? 3.0 : 1.0));
            if (coin(rng) < prob) {
                active[w] = true;
                frontier.push_back(w);
                times.push_back(t + 1);
                c.events.push_back({w, t + 1});
            }
        }
    }
    return c;
}

CascadeSet gen_cascades(const SocialGraph& g, const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = g.node_count();
    std::vector<Cascade> cascades(n == 0 ? 0 : cfg.cascade_count);
    std::vector<bool> planted(n, false);
    for (NodeId v : planted_brokers(n, cfg)) {
        planted[v] = true;
    }
    // Roots are drawn with weight followers + 1: accounts with an audience post
    // more, and uniform roots leave most cascades dying at a leaf.
    std::vector<std::uint64_t> cumulative(n);
    std::uint64_t total = 0;
    for (NodeId v = 0; v < n; ++v) {
        total += g.in_neighbors(v).size() + 1;
        cumulative[v] = total;
    }
    const std::uint64_t base = derive_seed(cfg.seed, "cascades");
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cascades.size()); ++i) {
        std::mt19937_64 rng(derive_seed(base, static_cast<std::uint64_t>(i)));
        const std::uint64_t ticket = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng);
        const auto root = static_cast<NodeId>(
            std::upper_bound(cumulative.begin(), cumulative.end(), ticket) - cumulative.begin());
        cascades[i] = simulate_cascade(g, root, cfg.edge_activation_prob, planted, rng);
        cascades[i].id = i;
    }
    return CascadeSet(n, std::move(cascades));
}

} // namespace brokerid
