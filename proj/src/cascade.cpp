#include "brokerid/cascade.hpp"

#include "brokerid/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace brokerid {

using nlohmann::json;

void normalize_events(std::vector<RetweetEvent>& events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const RetweetEvent& a, const RetweetEvent& b) { return a.time < b.time; });
    std::unordered_set<NodeId> seen;
    seen.reserve(events.size());
    std::erase_if(events, [&](const RetweetEvent& e) { return !seen.insert(e.user).second; });
}

CascadeSet::CascadeSet(std::size_t node_count, std::vector<Cascade> cascades)
    : node_count_(node_count), cascades_(std::move(cascades)) {
    std::unordered_set<std::int64_t> ids;
    ids.reserve(cascades_.size());
    std::vector<std::uint64_t> src_count(node_count + 1, 0);
    std::vector<std::uint64_t> part_count(node_count + 1, 0);
    for (auto& c : cascades_) {
        if (!ids.insert(c.id).second) {
            throw ValidationError("duplicate cascade id " + std::to_string(c.id));
        }
        if (c.root >= node_count) {
            throw ValidationError("cascade " + std::to_string(c.id) + ": root out of range");
        }
        for (const auto& e : c.events) {
            if (e.user >= node_count) {
                throw ValidationError("cascade " + std::to_string(c.id) + ": user out of range");
            }
            if (e.time < c.root_time) {
                throw ValidationError("cascade " + std::to_string(c.id) +
                                      ": event time precedes root time");
            }
        }
        normalize_events(c.events);
        ++src_count[c.root + 1];
        for (const auto& e : c.events) {
            ++part_count[e.user + 1];
        }
    }
    for (std::size_t i = 0; i < node_count; ++i) {
        src_count[i + 1] += src_count[i];
        part_count[i + 1] += part_count[i];
    }
    source_off_ = src_count;
    part_off_ = part_count;
    source_ids_.resize(source_off_.back());
    part_.resize(part_off_.back());
    // Filling in cascade order keeps every per-user list sorted by cascade index.
    for (std::uint32_t ci = 0; ci < cascades_.size(); ++ci) {
        const auto& c = cascades_[ci];
        source_ids_[src_count[c.root]++] = ci;
        for (std::uint32_t pos = 0; pos < c.events.size(); ++pos) {
            part_[part_count[c.events[pos].user]++] = Participation{ci, pos};
        }
    }
}

std::vector<NodeId> retweeters_after(const Cascade& c, NodeId v) {
    auto it = std::find_if(c.events.begin(), c.events.end(),
                           [v](const RetweetEvent& e) { return e.user == v; });
    if (it == c.events.end()) {
        return {};
    }
    const Timestamp t = it->time;
    auto later = std::upper_bound(c.events.begin(), c.events.end(), t,
                                  [](Timestamp x, const RetweetEvent& e) { return x < e.time; });
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(c.events.end() - later));
    for (; later != c.events.end(); ++later) {
        out.push_back(later->user);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CascadeSet parse_cascades(std::string_view text, const SocialGraph& g, bool strict) {
    std::vector<Cascade> cascades;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto resolve = [&](const std::string& label, NodeId& out) {
        if (g.find(label, out)) {
            return true;
        }
        if (strict) {
            throw ResolutionError("unknown user '" + label + "' at line " +
                                  std::to_string(line_no));
        }
        return false;
    };

    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        Cascade c;
        try {
            c.id = j.at("id").get<std::int64_t>();
            c.root_time = j.at("t0").get<std::int64_t>();
            const auto root = j.at("root").get<std::string>();
            bool root_ok = resolve(root, c.root);
            for (const auto& ev : j.at("events")) {
                if (!ev.is_array() || ev.size() != 2) {
                    throw ParseError("event must be [user, time]", line_no);
                }
                NodeId u;
                Timestamp t = ev[1].get<std::int64_t>();
                if (t < c.root_time) {
                    throw ValidationError("event time precedes root time at line " +
                                          std::to_string(line_no));
                }
                if (resolve(ev[0].get<std::string>(), u)) {
                    c.events.push_back({u, t});
                }
            }
            if (!root_ok) {
                continue;
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad cascade record: ") + e.what(), line_no);
        }
        cascades.push_back(std::move(c));
    }
    return CascadeSet(g.node_count(), std::move(cascades));
}

CascadeSet load_cascades(const std::filesystem::path& path, const SocialGraph& g, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open cascade file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_cascades(ss.str(), g, strict);
}

void write_cascades(const CascadeSet& d, const SocialGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    for (const auto& c : d.cascades()) {
        nlohmann::ordered_json events = nlohmann::ordered_json::array();
        for (const auto& e : c.events) {
            events.push_back(nlohmann::ordered_json::array({g.label(e.user), e.time}));
        }
        nlohmann::ordered_json j = {{"id", c.id}, {"root", g.label(c.root)}, {"t0", c.root_time}, {"events", events}};
        out << j.dump() << '\n';
    }
}

} // namespace brokerid
