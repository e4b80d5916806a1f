#include "brokerid/centrality.hpp"
#include "brokerid/errors.hpp"
#include "brokerid/serial.hpp"

#include <cmath>
#include <deque>
#include <stack>

namespace brokerid::serial {

std::vector<double> closeness(const DirectedView& view) {
    const std::size_t n = view.node_count();
    std::vector<double> out(n, 0.0);
    for (NodeId s = 0; s < n; ++s) {
        std::vector<std::int64_t> dist(n, -1);
        std::deque<NodeId> queue{s};
        dist[s] = 0;
        std::vector<std::uint64_t> per_level{1};
        while (!queue.empty()) {
            const NodeId v = queue.front();
            queue.pop_front();
            for (NodeId w : view.out->neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    if (per_level.size() <= static_cast<std::size_t>(dist[w])) {
                        per_level.push_back(0);
                    }
                    ++per_level[dist[w]];
                    queue.push_back(w);
                }
            }
        }
        double h = 0.0;
        for (std::size_t d = 1; d < per_level.size(); ++d) {
            h += static_cast<double>(per_level[d]) / static_cast<double>(d);
        }
        out[s] = h;
    }
    return out;
}

// Textbook Brandes with explicit predecessor lists.
std::vector<double> betweenness(const DirectedView& view, std::span<const NodeId> sources) {
    const std::size_t n = view.node_count();
    std::vector<double> cb(n, 0.0);
    for (NodeId s : sources) {
        std::vector<std::vector<NodeId>> pred(n);
        std::vector<double> sigma(n, 0.0);
        std::vector<std::int64_t> dist(n, -1);
        std::vector<double> delta(n, 0.0);
        std::stack<NodeId> order;
        std::deque<NodeId> queue{s};
        sigma[s] = 1.0;
        dist[s] = 0;
        while (!queue.empty()) {
            const NodeId v = queue.front();
            queue.pop_front();
            order.push(v);
            for (NodeId w : view.out->neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        while (!order.empty()) {
            const NodeId w = order.top();
            order.pop();
            for (NodeId v : pred[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) {
                cb[w] += delta[w];
            }
        }
    }
    return cb;
}

std::vector<double> pagerank(const DirectedView& view, const PageRankParams& params) {
    const std::size_t n = view.node_count();
    if (n == 0) {
        return {};
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n);
    double residual = 0.0;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        double dangling = 0.0;
        std::vector<double> share(n, 0.0);
        for (NodeId u = 0; u < n; ++u) {
            const auto deg = view.out->degree(u);
            if (deg == 0) {
                dangling += rank[u];
            } else {
                share[u] = rank[u] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - params.damping) * inv_n + params.damping * dangling * inv_n;
        std::vector<double> next(n);
        for (NodeId v = 0; v < n; ++v) {
            double pulled = 0.0;
            for (NodeId u : view.in->neighbors(v)) {
                pulled += share[u];
            }
            next[v] = base + params.damping * pulled;
        }
        residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            residual += std::abs(next[v] - rank[v]);
        }
        rank = std::move(next);
        if (residual < params.tol) {
            return rank;
        }
    }
    throw ConvergenceError("pagerank did not converge", residual);
}

} // namespace brokerid::serial
