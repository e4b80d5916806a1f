#include "brokerid/graph.hpp"

#include "brokerid/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace brokerid {

namespace {

Csr build_csr(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& sorted_edges) {
    Csr csr;
    csr.offsets.assign(n + 1, 0);
    csr.targets.reserve(sorted_edges.size());
    for (const auto& [u, v] : sorted_edges) {
        ++csr.offsets[u + 1];
        csr.targets.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) {
        csr.offsets[i + 1] += csr.offsets[i];
    }
    return csr;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

SocialGraph SocialGraph::from_edges(std::size_t node_count,
                                    std::span<const std::pair<NodeId, NodeId>> edges,
                                    bool dedup, std::vector<std::string> labels) {
    std::vector<std::pair<NodeId, NodeId>> es;
    es.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u >= node_count || v >= node_count) {
            throw ValidationError("edge endpoint out of range");
        }
        if (u == v) {
            if (!dedup) {
                throw ValidationError("self-loop on node " + std::to_string(u));
            }
            continue;
        }
        es.emplace_back(u, v);
    }
    std::sort(es.begin(), es.end());
    auto last = std::unique(es.begin(), es.end());
    if (last != es.end() && !dedup) {
        throw ValidationError("duplicate edge " + std::to_string(last->first) + " -> " +
                              std::to_string(last->second));
    }
    es.erase(last, es.end());

    SocialGraph g;
    g.node_count_ = node_count;
    g.out_ = build_csr(node_count, es);
    for (auto& e : es) {
        std::swap(e.first, e.second);
    }
    std::sort(es.begin(), es.end());
    g.in_ = build_csr(node_count, es);

    if (labels.empty()) {
        labels.reserve(node_count);
        for (std::size_t i = 0; i < node_count; ++i) {
            labels.push_back(std::to_string(i));
        }
    }
    if (labels.size() != node_count) {
        throw ValidationError("label count does not match node count");
    }
    g.labels_ = std::move(labels);
    g.index_.reserve(node_count);
    for (NodeId i = 0; i < node_count; ++i) {
        if (!g.index_.emplace(g.labels_[i], i).second) {
            throw ValidationError("duplicate node label '" + g.labels_[i] + "'");
        }
    }
    return g;
}

bool SocialGraph::has_edge(NodeId u, NodeId v) const {
    auto nb = out_neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

bool SocialGraph::find(std::string_view label, NodeId& out) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) {
        return false;
    }
    out = it->second;
    return true;
}

std::vector<std::pair<NodeId, NodeId>> SocialGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> es;
    es.reserve(edge_count());
    for (NodeId u = 0; u < node_count_; ++u) {
        for (NodeId v : out_neighbors(u)) {
            es.emplace_back(u, v);
        }
    }
    return es;
}

SocialGraph parse_edge_list(std::string_view text, bool dedup) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto intern = [&](std::string_view s) {
        auto [it, inserted] = ids.emplace(std::string(s), static_cast<NodeId>(labels.size()));
        if (inserted) {
            labels.emplace_back(s);
        }
        return it->second;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::size_t sep = line.find_first_of("\t,");
        if (sep == std::string_view::npos) {
            // Whitespace-separated pairs are accepted as well.
            sep = line.find(' ');
        }
        if (sep == std::string_view::npos) {
            throw ParseError("expected 'follower<TAB or ,>followee'", line_no);
        }
        std::string_view a = trim(line.substr(0, sep));
        std::string_view b = trim(line.substr(sep + 1));
        if (a.empty() || b.empty() || b.find_first_of("\t, ") != std::string_view::npos) {
            throw ParseError("expected exactly two fields", line_no);
        }
        NodeId u = intern(a);
        NodeId v = intern(b);
        if (!dedup && u == v) {
            throw ValidationError("self-loop '" + std::string(a) + "' at line " +
                                  std::to_string(line_no));
        }
        edges.emplace_back(u, v);
    }
    std::size_t n = labels.size();
    return SocialGraph::from_edges(n, edges, dedup, std::move(labels));
}

SocialGraph load_edge_list(const std::filesystem::path& path, bool dedup) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open edge list " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_edge_list(ss.str(), dedup);
}

void write_edge_list(const SocialGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    for (const auto& [u, v] : g.edges()) {
        out << g.label(u) << '\t' << g.label(v) << '\n';
    }
}

SocialGraph information_flow_view(const SocialGraph& g) {
    auto es = g.edges();
    for (auto& e : es) {
        std::swap(e.first, e.second);
    }
    return SocialGraph::from_edges(g.node_count(), es, false, g.labels());
}

const char* to_string(Orientation o) {
    return o == Orientation::follow ? "follow" : "information_flow";
}

Orientation orientation_from_string(std::string_view s) {
    if (s == "follow") {
        return Orientation::follow;
    }
    if (s == "information_flow" || s == "flow") {
        return Orientation::information_flow;
    }
    throw ArgumentError("unknown orientation '" + std::string(s) + "'");
}

std::vector<NodeId> undirected_neighbors(const SocialGraph& g, NodeId u) {
    auto a = g.out_neighbors(u);
    auto b = g.in_neighbors(u);
    std::vector<NodeId> merged;
    merged.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    return merged;
}

} // namespace brokerid
