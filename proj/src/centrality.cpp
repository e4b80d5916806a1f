#include "brokerid/centrality.hpp"

#include "brokerid/config_io.hpp"
#include "brokerid/errors.hpp"
#include "brokerid/serial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace brokerid {

namespace {

constexpr std::size_t kBetweennessBlocks = 64;

// Single-source Brandes pass; adds the dependencies of `s` into `acc`.
struct BrandesWorkspace {
    std::vector<double> sigma;
    std::vector<double> delta;
    std::vector<std::int64_t> dist;
    std::vector<NodeId> order;

    explicit BrandesWorkspace(std::size_t n) : sigma(n, 0.0), delta(n, 0.0), dist(n, -1) {
        order.reserve(n);
    }

    void accumulate(const DirectedView& view, NodeId s, std::vector<double>& acc) {
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        order.push_back(s);
        for (std::size_t head = 0; head < order.size(); ++head) {
            const NodeId v = order[head];
            for (NodeId w : view.out->neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    order.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                }
            }
        }
        for (std::size_t i = order.size(); i-- > 1;) {
            const NodeId w = order[i];
            const double coeff = (1.0 + delta[w]) / sigma[w];
            for (NodeId v : view.in->neighbors(w)) {
                if (dist[v] == dist[w] - 1) {
                    delta[v] += sigma[v] * coeff;
                }
            }
            acc[w] += delta[w];
        }
        for (NodeId v : order) {
            sigma[v] = 0.0;
            delta[v] = 0.0;
            dist[v] = -1;
        }
    }
};

std::vector<NodeId> betweenness_sources(std::size_t n, const BetweennessParams& params) {
    std::vector<NodeId> sources(n);
    std::iota(sources.begin(), sources.end(), NodeId{0});
    if (params.samples == 0 || params.samples >= n) {
        return sources;
    }
    std::mt19937_64 rng(params.seed);
    // Partial Fisher-Yates: the first `samples` slots are a uniform sample.
    for (std::size_t i = 0; i < params.samples; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(sources[i], sources[pick(rng)]);
    }
    sources.resize(params.samples);
    std::sort(sources.begin(), sources.end());
    return sources;
}

} // namespace

const char* to_string(Measure m) {
    switch (m) {
    case Measure::in_degree: return "in_degree";
    case Measure::out_degree: return "out_degree";
    case Measure::total_degree: return "total_degree";
    case Measure::closeness: return "closeness";
    case Measure::betweenness: return "betweenness";
    case Measure::pagerank: return "pagerank";
    case Measure::kcore: return "kcore";
    }
    return "?";
}

Measure measure_from_string(std::string_view s) {
    for (Measure m : {Measure::in_degree, Measure::out_degree, Measure::total_degree,
                      Measure::closeness, Measure::betweenness, Measure::pagerank,
                      Measure::kcore}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    if (s == "degree") {
        return Measure::total_degree;
    }
    throw ArgumentError("unknown measure '" + std::string(s) + "'");
}

CentralityVector degree(const SocialGraph& g, DegreeKind kind, Orientation o) {
    const DirectedView view(g, o);
    const std::size_t n = g.node_count();
    CentralityVector cv{kind == DegreeKind::in    ? Measure::in_degree
                        : kind == DegreeKind::out ? Measure::out_degree
                                                  : Measure::total_degree,
                        o, std::vector<double>(n, 0.0)};
    for (NodeId u = 0; u < n; ++u) {
        const auto in = static_cast<double>(view.in->degree(u));
        const auto out = static_cast<double>(view.out->degree(u));
        cv.values[u] = kind == DegreeKind::in ? in : kind == DegreeKind::out ? out : in + out;
    }
    return cv;
}

CentralityVector closeness(const SocialGraph& g, Orientation o, Exec exec) {
    const DirectedView view(g, o);
    CentralityVector cv{Measure::closeness, o, {}};
    if (exec == Exec::serial) {
        cv.values = serial::closeness(view);
        return cv;
    }
    const std::size_t n = g.node_count();
    cv.values.assign(n, 0.0);
#pragma omp parallel
    {
        std::vector<std::int64_t> dist(n, -1);
        std::vector<NodeId> order;
        order.reserve(n);
        std::vector<std::uint64_t> per_level;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const auto s = static_cast<NodeId>(i);
            order.assign(1, s);
            dist[s] = 0;
            per_level.assign(1, 1);
            for (std::size_t head = 0; head < order.size(); ++head) {
                const NodeId v = order[head];
                for (NodeId w : view.out->neighbors(v)) {
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        if (per_level.size() <= static_cast<std::size_t>(dist[w])) {
                            per_level.push_back(0);
                        }
                        ++per_level[dist[w]];
                        order.push_back(w);
                    }
                }
            }
            double h = 0.0;
            for (std::size_t d = 1; d < per_level.size(); ++d) {
                h += static_cast<double>(per_level[d]) / static_cast<double>(d);
            }
            cv.values[s] = h;
            for (NodeId v : order) {
                dist[v] = -1;
            }
        }
    }
    return cv;
}

CentralityVector betweenness(const SocialGraph& g, Orientation o, BetweennessParams params,
                             Exec exec) {
    const DirectedView view(g, o);
    const std::size_t n = g.node_count();
    const auto sources = betweenness_sources(n, params);
    const double scale = sources.size() < n && !sources.empty()
                             ? static_cast<double>(n) / static_cast<double>(sources.size())
                             : 1.0;
    CentralityVector cv{Measure::betweenness, o, {}};
    if (exec == Exec::serial) {
        cv.values = serial::betweenness(view, sources);
    } else {
        const std::size_t blocks = std::min(kBetweennessBlocks, sources.size());
        std::vector<std::vector<double>> partial(blocks);
#pragma omp parallel
        {
            BrandesWorkspace ws(n);
#pragma omp for schedule(dynamic, 1)
            for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
                const std::size_t lo = sources.size() * b / blocks;
                const std::size_t hi = sources.size() * (b + 1) / blocks;
                std::vector<double> acc(n, 0.0);
                for (std::size_t i = lo; i < hi; ++i) {
                    ws.accumulate(view, sources[i], acc);
                }
                partial[b] = std::move(acc);
            }
        }
        cv.values.assign(n, 0.0);
        for (const auto& acc : partial) {
            for (std::size_t v = 0; v < n; ++v) {
                cv.values[v] += acc[v];
            }
        }
    }
    if (scale != 1.0) {
        for (auto& x : cv.values) {
            x *= scale;
        }
    }
    return cv;
}

CentralityVector pagerank(const SocialGraph& g, Orientation o, PageRankParams params, Exec exec) {
    const DirectedView view(g, o);
    CentralityVector cv{Measure::pagerank, o, {}};
    if (exec == Exec::serial) {
        cv.values = serial::pagerank(view, params);
        return cv;
    }
    const std::size_t n = g.node_count();
    if (n == 0) {
        return cv;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n);
    std::vector<double> next(n, 0.0);
    std::vector<double> share(n, 0.0);
    double residual = 0.0;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            const auto deg = view.out->degree(u);
            if (deg == 0) {
                dangling += rank[u];
                share[u] = 0.0;
            } else {
                share[u] = rank[u] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - params.damping) * inv_n + params.damping * dangling * inv_n;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            double pulled = 0.0;
            for (NodeId u : view.in->neighbors(static_cast<NodeId>(i))) {
                pulled += share[u];
            }
            next[i] = base + params.damping * pulled;
        }
        residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            residual += std::abs(next[v] - rank[v]);
        }
        rank.swap(next);
        if (residual < params.tol) {
            cv.values = std::move(rank);
            return cv;
        }
    }
    throw ConvergenceError("pagerank did not converge in " + std::to_string(params.max_iter) +
                               " iterations",
                           residual);
}

CentralityVector kcore(const SocialGraph& g) {
    const std::size_t n = g.node_count();
    CentralityVector cv{Measure::kcore, Orientation::follow, std::vector<double>(n, 0.0)};
    if (n == 0) {
        return cv;
    }
    std::vector<std::vector<NodeId>> adj(n);
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (NodeId u = 0; u < n; ++u) {
        adj[u] = undirected_neighbors(g, u);
        deg[u] = adj[u].size();
        max_deg = std::max(max_deg, deg[u]);
    }
    // Batagelj-Zaversnik bucket peeling.
    std::vector<std::size_t> bin(max_deg + 1, 0);
    for (auto d : deg) {
        ++bin[d];
    }
    std::size_t start = 0;
    for (auto& b : bin) {
        const auto count = b;
        b = start;
        start += count;
    }
    std::vector<NodeId> vert(n);
    std::vector<std::size_t> pos(n);
    for (NodeId u = 0; u < n; ++u) {
        pos[u] = bin[deg[u]]++;
        vert[pos[u]] = u;
    }
    for (std::size_t d = max_deg; d > 0; --d) {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = vert[i];
        for (NodeId u : adj[v]) {
            if (deg[u] > deg[v]) {
                const std::size_t du = deg[u];
                const std::size_t pu = pos[u];
                const std::size_t pw = bin[du];
                const NodeId w = vert[pw];
                if (u != w) {
                    std::swap(vert[pu], vert[pw]);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                ++bin[du];
                --deg[u];
            }
        }
    }
    for (NodeId u = 0; u < n; ++u) {
        cv.values[u] = static_cast<double>(deg[u]);
    }
    return cv;
}

CentralityVector compute_centrality(const SocialGraph& g, Measure m, const CentralityOptions& opts) {
    switch (m) {
    case Measure::in_degree: return degree(g, DegreeKind::in, opts.orientation);
    case Measure::out_degree: return degree(g, DegreeKind::out, opts.orientation);
    case Measure::total_degree: return degree(g, DegreeKind::total, opts.orientation);
    case Measure::closeness: return closeness(g, opts.orientation, opts.exec);
    case Measure::betweenness: return betweenness(g, opts.orientation, opts.betweenness, opts.exec);
    case Measure::pagerank: return pagerank(g, opts.orientation, opts.pagerank, opts.exec);
    case Measure::kcore: {
        auto cv = kcore(g);
        cv.orientation = opts.orientation;
        return cv;
    }
    }
    throw ArgumentError("unknown measure");
}

void write_centrality_csv(const std::vector<CentralityVector>& cols, const SocialGraph& g,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "user";
    for (const auto& c : cols) {
        out << ',' << to_string(c.measure);
    }
    out << '\n';
    for (NodeId u = 0; u < g.node_count(); ++u) {
        out << g.label(u);
        for (const auto& c : cols) {
            out << ',' << format_real(c.values[u]);
        }
        out << '\n';
    }
}

std::vector<CentralityVector> read_centrality_csv(const std::filesystem::path& path,
                                                  const SocialGraph& g, Orientation o) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty centrality file " + path.string());
    }
    const auto header = split(line);
    std::vector<CentralityVector> cols;
    for (std::size_t i = 1; i < header.size(); ++i) {
        cols.push_back({measure_from_string(header[i]), o, std::vector<double>(g.node_count(), 0.0)});
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ParseError("column count mismatch", line_no);
        }
        NodeId u;
        if (!g.find(cells[0], u)) {
            throw ResolutionError("unknown user '" + cells[0] + "' in centrality file");
        }
        for (std::size_t i = 1; i < cells.size(); ++i) {
            cols[i - 1].values[u] = std::strtod(cells[i].c_str(), nullptr);
        }
    }
    return cols;
}

void write_centrality_long_csv(const std::vector<CentralityVector>& cols, const SocialGraph& g,
                               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "user,measure,value\n";
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (const auto& c : cols) {
            out << g.label(u) << ',' << to_string(c.measure) << ',' << format_real(c.values[u])
                << '\n';
        }
    }
}

} // namespace brokerid
