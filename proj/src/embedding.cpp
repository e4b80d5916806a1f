#include "brokerid/embedding.hpp"

#include "brokerid/config_io.hpp"
#include "brokerid/errors.hpp"
#include "brokerid/serial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

namespace brokerid {

const char* to_string(Summary s) {
    switch (s) {
    case Summary::sum: return "sum";
    case Summary::mean: return "mean";
    case Summary::max: return "max";
    }
    return "?";
}

Summary summary_from_string(std::string_view s) {
    if (s == "sum") return Summary::sum;
    if (s == "mean") return Summary::mean;
    if (s == "max") return Summary::max;
    throw ArgumentError("unknown summary '" + std::string(s) + "'");
}

const char* to_string(Direction d) {
    switch (d) {
    case Direction::in: return "in";
    case Direction::out: return "out";
    case Direction::total: return "total";
    }
    return "?";
}

Direction direction_from_string(std::string_view s) {
    if (s == "in") return Direction::in;
    if (s == "out") return Direction::out;
    if (s == "total") return Direction::total;
    throw ArgumentError("unknown direction '" + std::string(s) + "'");
}

std::string FeatureDefinition::to_string() const {
    std::string s = brokerid::to_string(base);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        std::string head = brokerid::to_string(it->summary);
        if (it->direction == Direction::in) {
            head += '-';
        } else if (it->direction == Direction::out) {
            head += '+';
        }
        s = head + "(" + s + ")";
    }
    return s;
}

FeatureDefinition FeatureDefinition::parse(std::string_view text) {
    FeatureDefinition def;
    std::string_view rest = text;
    while (true) {
        auto open = rest.find('(');
        if (open == std::string_view::npos) {
            break;
        }
        if (rest.back() != ')') {
            throw ParseError("unbalanced feature definition '" + std::string(text) + "'");
        }
        std::string_view head = rest.substr(0, open);
        Direction dir = Direction::total;
        if (!head.empty() && head.back() == '-') {
            dir = Direction::in;
            head.remove_suffix(1);
        } else if (!head.empty() && head.back() == '+') {
            dir = Direction::out;
            head.remove_suffix(1);
        }
        try {
            def.ops.push_back({dir, summary_from_string(head)});
        } catch (const ArgumentError&) {
            throw ParseError("bad operator in feature definition '" + std::string(text) + "'");
        }
        rest = rest.substr(open + 1, rest.size() - open - 2);
    }
    try {
        def.base = measure_from_string(rest);
    } catch (const ArgumentError&) {
        throw ParseError("bad base feature in definition '" + std::string(text) + "'");
    }
    return def;
}

FeatureDefinition FeatureDefinition::parent() const {
    FeatureDefinition p = *this;
    if (!p.ops.empty()) {
        p.ops.erase(p.ops.begin());
    }
    return p;
}

void EmbedConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ArgumentError("lambda must lie in [0, 1]");
    }
    if (ego_distance < 1) {
        throw ArgumentError("ego_distance must be >= 1");
    }
    if (bins < 2) {
        throw ArgumentError("bins must be >= 2");
    }
    if (!(bin_fraction > 0.0 && bin_fraction < 1.0)) {
        throw ArgumentError("bin_fraction must lie in (0, 1)");
    }
    if (base_features.empty()) {
        throw ArgumentError("at least one base feature is required");
    }
}

std::vector<std::string> FeatureMatrix::names() const {
    std::vector<std::string> out;
    out.reserve(definitions.size());
    for (const auto& d : definitions) {
        out.push_back(d.to_string());
    }
    return out;
}

RelationalGraph::RelationalGraph(const SocialGraph& g)
    : n_(g.node_count()), in_(&g.in_csr()), out_(&g.out_csr()) {
    total_.offsets.assign(n_ + 1, 0);
    total_.targets.reserve(g.edge_count() * 2);
    for (NodeId u = 0; u < n_; ++u) {
        auto a = g.out_neighbors(u);
        auto b = g.in_neighbors(u);
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(total_.targets));
        total_.offsets[u + 1] = total_.targets.size();
    }
}

const Csr& RelationalGraph::neighbors(Direction d) const {
    switch (d) {
    case Direction::in: return *in_;
    case Direction::out: return *out_;
    case Direction::total: return total_;
    }
    return total_;
}

std::vector<double> apply_operator(const RelationalGraph& rg, std::span<const double> col,
                                   Direction dir, Summary summary, Exec exec) {
    const std::size_t n = rg.node_count();
    if (col.size() != n) {
        throw ArgumentError("column length does not match node count");
    }
    const Csr& adj = rg.neighbors(dir);
    std::vector<double> out(n, 0.0);
    auto kernel = [&](NodeId v) {
        auto nb = adj.neighbors(v);
        if (nb.empty()) {
            return;
        }
        double acc = summary == Summary::max ? col[nb[0]] : 0.0;
        for (NodeId u : nb) {
            if (summary == Summary::max) {
                acc = std::max(acc, col[u]);
            } else {
                acc += col[u];
            }
        }
        out[v] = summary == Summary::mean ? acc / static_cast<double>(nb.size()) : acc;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) {
            kernel(static_cast<NodeId>(v));
        }
    } else {
        for (NodeId v = 0; v < n; ++v) {
            kernel(v);
        }
    }
    return out;
}

std::vector<double> apply_operator(const SocialGraph& g, std::span<const double> col,
                                   Direction dir, Summary summary, Exec exec) {
    if (exec == Exec::serial) {
        return serial::apply_operator(g, col, dir, summary);
    }
    return apply_operator(RelationalGraph(g), col, dir, summary, exec);
}

std::vector<double> log_bin_transform(std::span<const double> col, int bins, double bin_fraction) {
    if (bins < 2 || !(bin_fraction > 0.0 && bin_fraction < 1.0)) {
        throw ArgumentError("log binning needs bins >= 2 and 0 < bin_fraction < 1");
    }
    const std::size_t n = col.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return col[a] < col[b] || (col[a] == col[b] && a < b);
    });
    std::vector<double> out(n, 0.0);
    std::size_t pos = 0;
    std::size_t remaining = n;
    std::size_t bin = 0;
    double group_value = 0.0;
    double group_bin = 0.0;
    while (pos < n) {
        std::size_t take = remaining;
        if (bin + 1 < static_cast<std::size_t>(bins)) {
            take = static_cast<std::size_t>(
                std::ceil(bin_fraction * static_cast<double>(remaining) - 1e-9));
            take = std::clamp<std::size_t>(take, 1, remaining);
        }
        for (std::size_t k = 0; k < take; ++k, ++pos) {
            const auto v = order[pos];
            if (pos == 0 || col[v] != group_value) {
                group_value = col[v];
                group_bin = static_cast<double>(bin);
            }
            out[v] = group_bin;
        }
        remaining -= take;
        ++bin;
    }
    return out;
}

double binned_agreement(std::span<const double> a, std::span<const double> b) {
    if (a.empty()) {
        return 1.0;
    }
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same += a[i] == b[i] ? 1 : 0;
    }
    return static_cast<double>(same) / static_cast<double>(a.size());
}

namespace {

constexpr double kAgreementEps = 1e-9;

// True when the binned agreement reaches lambda; bails out once that is impossible.
bool agrees(std::span<const double> a, std::span<const double> b, double lambda) {
    const std::size_t n = a.size();
    const double needed = lambda * static_cast<double>(n) - kAgreementEps;
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) {
            ++mismatches;
            if (static_cast<double>(n - mismatches) < needed) {
                return false;
            }
        }
    }
    return static_cast<double>(n - mismatches) >= needed;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // The smaller index stays the root, so every root is its component's earliest column.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

FeatureMatrix select_columns(const FeatureMatrix& fm, const std::vector<std::size_t>& keep) {
    FeatureMatrix out;
    out.rows = fm.rows;
    for (auto k : keep) {
        out.definitions.push_back(fm.definitions[k]);
        out.raw.push_back(fm.raw[k]);
        out.transformed.push_back(fm.transformed[k]);
    }
    return out;
}

std::vector<std::size_t> surviving_columns(const FeatureMatrix& fm, double lambda,
                                           std::size_t frozen) {
    const std::size_t k = fm.cols();
    frozen = std::min(frozen, k);
    UnionFind uf(k);
    // Frozen-frozen pairs never change the outcome, so only pairs touching a
    // new column are compared.
    std::vector<std::vector<std::size_t>> links(k);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t jj = static_cast<std::int64_t>(frozen); jj < static_cast<std::int64_t>(k);
         ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        for (std::size_t i = 0; i < j; ++i) {
            if (agrees(fm.transformed[i], fm.transformed[j], lambda)) {
                links[j].push_back(i);
            }
        }
    }
    for (std::size_t j = frozen; j < k; ++j) {
        for (auto i : links[j]) {
            uf.unite(i, j);
        }
    }
    std::vector<bool> has_frozen(k, false);
    for (std::size_t i = 0; i < frozen; ++i) {
        has_frozen[uf.find(i)] = true;
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < k; ++i) {
        const auto root = uf.find(i);
        if (i < frozen || (!has_frozen[root] && root == i)) {
            keep.push_back(i);
        }
    }
    return keep;
}

void bin_new_columns(FeatureMatrix& fm, std::size_t from, const EmbedConfig& cfg) {
    fm.transformed.resize(fm.raw.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = static_cast<std::int64_t>(from); c < static_cast<std::int64_t>(fm.raw.size());
         ++c) {
        fm.transformed[c] = log_bin_transform(fm.raw[c], cfg.bins, cfg.bin_fraction);
    }
}

std::vector<double> base_values(const SocialGraph& g, Measure m, const EmbedConfig& cfg,
                                std::span<const CentralityVector> precomputed) {
    for (const auto& cv : precomputed) {
        if (cv.measure == m && cv.values.size() == g.node_count() &&
            (cv.orientation == cfg.centrality.orientation || m == Measure::kcore)) {
            return cv.values;
        }
    }
    return compute_centrality(g, m, cfg.centrality).values;
}

} // namespace

FeatureMatrix prune_features(const FeatureMatrix& fm, double lambda, std::size_t frozen) {
    return select_columns(fm, surviving_columns(fm, lambda, frozen));
}

FeatureMatrix compute_base_matrix(const SocialGraph& g, const EmbedConfig& cfg,
                                  std::span<const CentralityVector> precomputed) {
    cfg.validate();
    FeatureMatrix fm;
    fm.rows = g.node_count();
    for (Measure m : cfg.base_features) {
        fm.definitions.push_back({m, {}});
        fm.raw.push_back(base_values(g, m, cfg, precomputed));
    }
    bin_new_columns(fm, 0, cfg);
    return fm;
}

FeatureMatrix learn_features(const SocialGraph& g, const EmbedConfig& cfg,
                             std::span<const CentralityVector> precomputed) {
    FeatureMatrix fm = prune_features(compute_base_matrix(g, cfg, precomputed), cfg.lambda);
    const RelationalGraph rg(g);
    std::size_t frontier_begin = 0;
    for (int layer = 1; layer <= cfg.ego_distance; ++layer) {
        const std::size_t frontier_end = fm.cols();
        for (std::size_t parent = frontier_begin; parent < frontier_end; ++parent) {
            for (Direction dir : cfg.directions) {
                for (Summary s : cfg.summaries) {
                    FeatureDefinition def = fm.definitions[parent];
                    def.ops.insert(def.ops.begin(), RelationalOp{dir, s});
                    fm.definitions.push_back(std::move(def));
                    fm.raw.push_back(apply_operator(rg, fm.raw[parent], dir, s, cfg.centrality.exec));
                }
            }
        }
        bin_new_columns(fm, frontier_end, cfg);
        fm = prune_features(fm, cfg.lambda, frontier_end);
        if (fm.cols() == frontier_end) {
            break;
        }
        frontier_begin = frontier_end;
    }
    return fm;
}

FeatureMatrix transfer_features(std::span<const FeatureDefinition> defs, const SocialGraph& target,
                                const EmbedConfig& cfg,
                                std::span<const CentralityVector> precomputed) {
    cfg.validate();
    for (const auto& d : defs) {
        if (std::find(cfg.base_features.begin(), cfg.base_features.end(), d.base) ==
            cfg.base_features.end()) {
            throw DefinitionError("definition '" + d.to_string() +
                                  "' uses a base feature that is not configured");
        }
    }
    const RelationalGraph rg(target);
    std::map<std::string, std::vector<double>> cache;
    std::function<const std::vector<double>&(const FeatureDefinition&)> eval =
        [&](const FeatureDefinition& d) -> const std::vector<double>& {
        const auto key = d.to_string();
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
        std::vector<double> values;
        if (d.ops.empty()) {
            values = base_values(target, d.base, cfg, precomputed);
        } else {
            const auto& inner = eval(d.parent());
            values = apply_operator(rg, inner, d.ops.front().direction, d.ops.front().summary,
                                    cfg.centrality.exec);
        }
        return cache.emplace(key, std::move(values)).first->second;
    };

    FeatureMatrix fm;
    fm.rows = target.node_count();
    for (const auto& d : defs) {
        fm.definitions.push_back(d);
        fm.raw.push_back(eval(d));
    }
    bin_new_columns(fm, 0, cfg);
    return fm;
}

void write_features_csv(const FeatureMatrix& fm, const SocialGraph& g,
                        const std::filesystem::path& path, bool transformed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "user";
    for (const auto& d : fm.definitions) {
        out << ',' << d.to_string();
    }
    out << '\n';
    const auto& m = transformed ? fm.transformed : fm.raw;
    for (NodeId u = 0; u < fm.rows; ++u) {
        out << g.label(u);
        for (const auto& col : m) {
            out << ',' << format_real(col[u]);
        }
        out << '\n';
    }
}

void write_definitions_json(const FeatureMatrix& fm, const EmbedConfig& cfg,
                            const std::filesystem::path& path) {
    Json j;
    j["config"] = cfg;
    j["definitions"] = fm.names();
    write_json_file(j, path);
}

std::vector<FeatureDefinition> read_definitions_json(const std::filesystem::path& path,
                                                     EmbedConfig* cfg) {
    const Json j = read_json_file(path);
    std::vector<FeatureDefinition> defs;
    try {
        for (const auto& s : j.at("definitions")) {
            defs.push_back(FeatureDefinition::parse(s.get<std::string>()));
        }
        if (cfg != nullptr && j.contains("config")) {
            *cfg = j.at("config").get<EmbedConfig>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return defs;
}

} // namespace brokerid
