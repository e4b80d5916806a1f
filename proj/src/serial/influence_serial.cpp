#include "brokerid/serial.hpp"

#include <algorithm>

namespace brokerid::serial {

// Sorted-vector unions streamed one user at a time.

std::vector<std::uint64_t> source_spreader_scores(const CascadeSet& d) {
    std::vector<std::uint64_t> out(d.node_count(), 0);
    std::vector<NodeId> users;
    for (NodeId u = 0; u < d.node_count(); ++u) {
        users.clear();
        for (auto ci : d.by_source(u)) {
            for (const auto& e : d.cascades()[ci].events) {
                users.push_back(e.user);
            }
        }
        std::sort(users.begin(), users.end());
        out[u] = static_cast<std::uint64_t>(std::unique(users.begin(), users.end()) - users.begin());
    }
    return out;
}

std::vector<std::uint64_t> broker_scores(const CascadeSet& d) {
    std::vector<std::uint64_t> out(d.node_count(), 0);
    std::vector<NodeId> users;
    for (NodeId u = 0; u < d.node_count(); ++u) {
        users.clear();
        for (const auto& p : d.by_participant(u)) {
            const auto& c = d.cascades()[p.cascade];
            auto later = retweeters_after(c, u);
            users.insert(users.end(), later.begin(), later.end());
        }
        std::sort(users.begin(), users.end());
        out[u] = static_cast<std::uint64_t>(std::unique(users.begin(), users.end()) - users.begin());
    }
    return out;
}

} // namespace brokerid::serial
