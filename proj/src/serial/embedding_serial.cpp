#include "brokerid/embedding.hpp"
#include "brokerid/serial.hpp"

#include <algorithm>

namespace brokerid::serial {

std::vector<double> apply_operator(const SocialGraph& g, std::span<const double> col,
                                   Direction dir, Summary summary) {
    std::vector<double> out(g.node_count(), 0.0);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        std::vector<NodeId> nb;
        if (dir == Direction::in) {
            nb.assign(g.in_neighbors(v).begin(), g.in_neighbors(v).end());
        } else if (dir == Direction::out) {
            nb.assign(g.out_neighbors(v).begin(), g.out_neighbors(v).end());
        } else {
            nb = undirected_neighbors(g, v);
        }
        if (nb.empty()) {
            continue;
        }
        double acc = summary == Summary::max ? col[nb.front()] : 0.0;
        for (NodeId u : nb) {
            acc = summary == Summary::max ? std::max(acc, col[u]) : acc + col[u];
        }
        out[v] = summary == Summary::mean ? acc / static_cast<double>(nb.size()) : acc;
    }
    return out;
}

} // namespace brokerid::serial
