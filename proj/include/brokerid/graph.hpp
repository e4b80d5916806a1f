#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace brokerid {

using NodeId = std::uint32_t;

/// Compressed sparse adjacency: neighbors of u are targets[offsets[u] .. offsets[u+1]).
struct Csr {
    std::vector<std::uint64_t> offsets{0};
    std::vector<NodeId> targets;

    std::span<const NodeId> neighbors(NodeId u) const {
        return {targets.data() + offsets[u], targets.data() + offsets[u + 1]};
    }
    std::size_t degree(NodeId u) const { return offsets[u + 1] - offsets[u]; }

    bool operator==(const Csr&) const = default;
};

/// Immutable directed follow graph. Edge (u, v) means "u follows v".
///
/// Both the out-adjacency and its transpose are materialized, each list sorted by
/// target index. External string ids map to dense indices by first appearance.
class SocialGraph {
public:
    SocialGraph() = default;

    /// Builds from index pairs. Throws ValidationError on self-loops, duplicates or
    /// out-of-range endpoints unless `dedup` is set, in which case those are dropped
    /// (out-of-range is always an error).
    static SocialGraph from_edges(std::size_t node_count,
                                  std::span<const std::pair<NodeId, NodeId>> edges,
                                  bool dedup = true,
                                  std::vector<std::string> labels = {});

    std::size_t node_count() const { return node_count_; }
    std::size_t edge_count() const { return out_.targets.size(); }

    std::span<const NodeId> out_neighbors(NodeId u) const { return out_.neighbors(u); }
    std::span<const NodeId> in_neighbors(NodeId u) const { return in_.neighbors(u); }
    std::size_t out_degree(NodeId u) const { return out_.degree(u); }
    std::size_t in_degree(NodeId u) const { return in_.degree(u); }
    bool has_edge(NodeId u, NodeId v) const;

    const Csr& out_csr() const { return out_; }
    const Csr& in_csr() const { return in_; }

    const std::string& label(NodeId u) const { return labels_[u]; }
    const std::vector<std::string>& labels() const { return labels_; }
    /// Returns false when the label is unknown.
    bool find(std::string_view label, NodeId& out) const;

    /// All (u, v) pairs in out-adjacency order.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    bool operator==(const SocialGraph& other) const {
        return node_count_ == other.node_count_ && out_ == other.out_ && in_ == other.in_ &&
               labels_ == other.labels_;
    }

private:
    std::size_t node_count_ = 0;
    Csr out_;
    Csr in_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> index_;
};

/// Reads `follower<TAB or ,>followee` lines; `#` lines and blank lines are skipped.
SocialGraph load_edge_list(const std::filesystem::path& path, bool dedup = true);
SocialGraph parse_edge_list(std::string_view text, bool dedup = true);
void write_edge_list(const SocialGraph& g, const std::filesystem::path& path);

/// Edge-reversed graph (followee -> follower), the direction content travels.
SocialGraph information_flow_view(const SocialGraph& g);

/// Which edge direction centralities and traversals walk.
enum class Orientation { follow, information_flow };

const char* to_string(Orientation o);
Orientation orientation_from_string(std::string_view s);

/// Out/in adjacency as seen under an orientation, without copying the graph.
struct DirectedView {
    const Csr* out;
    const Csr* in;

    DirectedView(const SocialGraph& g, Orientation o)
        : out(o == Orientation::follow ? &g.out_csr() : &g.in_csr()),
          in(o == Orientation::follow ? &g.in_csr() : &g.out_csr()) {}

    std::size_t node_count() const { return out->offsets.size() - 1; }
};

/// Sorted union of in- and out-neighbors (the undirected projection).
std::vector<NodeId> undirected_neighbors(const SocialGraph& g, NodeId u);

} // namespace brokerid
