#include "brokerid/influence.hpp"

#include "brokerid/config_io.hpp"
#include "brokerid/errors.hpp"
#include "brokerid/serial.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace brokerid {

namespace {

// Each thread owns a stamp array; a user is counted once per owner node because
// the owner index is written as the stamp.
template <typename Visit>
std::vector<std::uint64_t> stamped_union_sizes(std::size_t n, Visit visit) {
    std::vector<std::uint64_t> out(n, 0);
#pragma omp parallel
    {
        std::vector<std::uint32_t> stamp(n, 0);
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const auto u = static_cast<NodeId>(i);
            const std::uint32_t tag = u + 1;
            std::uint64_t count = 0;
            visit(u, [&](NodeId w) {
                if (stamp[w] != tag) {
                    stamp[w] = tag;
                    ++count;
                }
            });
            out[u] = count;
        }
    }
    return out;
}

} // namespace

std::vector<std::uint64_t> source_spreader_scores(const CascadeSet& d, Exec exec) {
    if (exec == Exec::serial) {
        return serial::source_spreader_scores(d);
    }
    const auto& cs = d.cascades();
    return stamped_union_sizes(d.node_count(), [&](NodeId u, auto&& add) {
        for (auto ci : d.by_source(u)) {
            for (const auto& e : cs[ci].events) {
                add(e.user);
            }
        }
    });
}

std::vector<std::uint64_t> broker_scores(const CascadeSet& d, Exec exec) {
    if (exec == Exec::serial) {
        return serial::broker_scores(d);
    }
    const auto& cs = d.cascades();
    return stamped_union_sizes(d.node_count(), [&](NodeId u, auto&& add) {
        for (const auto& p : d.by_participant(u)) {
            const auto& ev = cs[p.cascade].events;
            const Timestamp t = ev[p.position].time;
            std::size_t k = p.position + 1;
            while (k < ev.size() && ev[k].time == t) {
                ++k;
            }
            for (; k < ev.size(); ++k) {
                add(ev[k].user);
            }
        }
    });
}

std::vector<std::uint64_t> retweet_counts(const CascadeSet& d) {
    std::vector<std::uint64_t> out(d.node_count());
    for (NodeId u = 0; u < d.node_count(); ++u) {
        out[u] = d.by_participant(u).size();
    }
    return out;
}

InfluenceTable build_influence_table(const CascadeSet& d, Exec exec) {
    InfluenceTable t;
    t.source_score = source_spreader_scores(d, exec);
    t.broker_score = broker_scores(d, exec);
    t.retweet_count = retweet_counts(d);
    t.broker_per_retweet.resize(t.broker_score.size());
    for (std::size_t u = 0; u < t.broker_score.size(); ++u) {
        t.broker_per_retweet[u] =
            t.retweet_count[u] == 0
                ? 0.0
                : static_cast<double>(t.broker_score[u]) / static_cast<double>(t.retweet_count[u]);
    }
    return t;
}

void write_influence_csv(const InfluenceTable& t, const SocialGraph& g,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "user,source_score,broker_score,retweet_count,broker_per_retweet\n";
    for (NodeId u = 0; u < t.size(); ++u) {
        out << g.label(u) << ',' << t.source_score[u] << ',' << t.broker_score[u] << ','
            << t.retweet_count[u] << ',' << format_real(t.broker_per_retweet[u]) << '\n';
    }
}

InfluenceTable read_influence_csv(const std::filesystem::path& path, const SocialGraph& g) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    const std::size_t n = g.node_count();
    InfluenceTable t;
    t.source_score.assign(n, 0);
    t.broker_score.assign(n, 0);
    t.retweet_count.assign(n, 0);
    t.broker_per_retweet.assign(n, 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string user, s, b, r, bpr;
        if (!std::getline(ss, user, ',') || !std::getline(ss, s, ',') ||
            !std::getline(ss, b, ',') || !std::getline(ss, r, ',') || !std::getline(ss, bpr)) {
            throw ParseError("expected 5 columns", line_no);
        }
        NodeId u;
        if (!g.find(user, u)) {
            throw ResolutionError("unknown user '" + user + "' in scores file");
        }
        try {
            t.source_score[u] = std::stoull(s);
            t.broker_score[u] = std::stoull(b);
            t.retweet_count[u] = std::stoull(r);
            t.broker_per_retweet[u] = std::stod(bpr);
        } catch (const std::exception&) {
            throw ParseError("non-numeric score", line_no);
        }
    }
    return t;
}

} // namespace brokerid
