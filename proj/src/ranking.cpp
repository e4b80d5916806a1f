#include "brokerid/ranking.hpp"

#include "brokerid/config_io.hpp"
#include "brokerid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace brokerid {

bool TopSet::contains(NodeId v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

std::size_t top_p_count(double p, std::size_t eligible_count) {
    const double exact = p * static_cast<double>(eligible_count) / 100.0;
    const auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::min(k, eligible_count);
}

TopSet top_p_set(std::span<const double> scores, double p, std::span<const NodeId> eligible,
                 std::string score_name) {
    if (!(p > 0.0 && p <= 100.0)) {
        throw ArgumentError("p must lie in (0, 100]");
    }
    if (eligible.empty()) {
        throw ArgumentError("eligible set is empty");
    }
    TopSet t;
    t.score_name = std::move(score_name);
    t.p = p;
    t.eligible.assign(eligible.begin(), eligible.end());
    std::sort(t.eligible.begin(), t.eligible.end());
    t.eligible.erase(std::unique(t.eligible.begin(), t.eligible.end()), t.eligible.end());
    for (NodeId v : t.eligible) {
        if (v >= scores.size()) {
            throw ArgumentError("eligible node outside score vector");
        }
    }
    const std::size_t k = top_p_count(p, t.eligible.size());
    std::vector<NodeId> ranked = t.eligible;
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                      [&](NodeId a, NodeId b) {
                          return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });
    t.members.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(t.members.begin(), t.members.end());
    t.cutoff_rank = k;
    return t;
}

TopSet top_p_set(std::span<const double> scores, double p, std::string score_name) {
    std::vector<NodeId> all(scores.size());
    std::iota(all.begin(), all.end(), NodeId{0});
    return top_p_set(scores, p, all, std::move(score_name));
}

double overlap_p(const TopSet& a, const TopSet& b) {
    if (a.p != b.p) {
        throw ArgumentError("overlap needs top sets cut at the same p");
    }
    if (a.eligible != b.eligible) {
        throw ArgumentError("overlap needs top sets over the same eligible nodes");
    }
    if (a.members.empty()) {
        return 0.0;
    }
    std::vector<NodeId> common;
    std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                          std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(a.members.size());
}

OverlapMatrix overlap_matrix(std::span<const NamedScores> scores, double p,
                             std::span<const NodeId> eligible) {
    if (scores.size() < 2) {
        throw ArgumentError("overlap matrix needs at least two score maps");
    }
    std::vector<TopSet> tops;
    tops.reserve(scores.size());
    for (const auto& s : scores) {
        tops.push_back(top_p_set(s.values, p, eligible, s.name));
    }
    OverlapMatrix m;
    m.p = p;
    m.values.assign(scores.size(), std::vector<double>(scores.size(), 0.0));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        m.names.push_back(scores[i].name);
        for (std::size_t j = 0; j < scores.size(); ++j) {
            m.values[i][j] = overlap_p(tops[i], tops[j]);
        }
    }
    return m;
}

OverlapMatrix overlap_matrix(std::span<const NamedScores> scores, double p) {
    if (scores.empty()) {
        throw ArgumentError("overlap matrix needs at least two score maps");
    }
    std::vector<NodeId> all(scores.front().values.size());
    std::iota(all.begin(), all.end(), NodeId{0});
    return overlap_matrix(scores, p, all);
}

std::vector<NodeId> cascade_active_nodes(const CascadeSet& d) {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < d.node_count(); ++v) {
        if (!d.by_source(v).empty() || !d.by_participant(v).empty()) {
            out.push_back(v);
        }
    }
    return out;
}

void write_overlap_csv(const OverlapMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "score";
    for (const auto& n : m.names) {
        out << ',' << n;
    }
    out << '\n';
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        out << m.names[i];
        for (double v : m.values[i]) {
            out << ',' << format_real(v);
        }
        out << '\n';
    }
}

void write_overlap_json(const OverlapMatrix& m, const std::filesystem::path& path) {
    Json j{{"p", m.p}, {"names", m.names}, {"matrix", m.values}};
    write_json_file(j, path);
}

} // namespace brokerid
