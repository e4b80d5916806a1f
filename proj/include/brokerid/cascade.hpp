#pragma once

#include "brokerid/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace brokerid {

using Timestamp = std::int64_t;

struct RetweetEvent {
    NodeId user;
    Timestamp time;

    bool operator==(const RetweetEvent&) const = default;
};

/// One original post and its reposts, events ascending by time (stable on ties).
/// A user appears at most once in `events`; the root is not an event.
struct Cascade {
    std::int64_t id = 0;
    NodeId root = 0;
    Timestamp root_time = 0;
    std::vector<RetweetEvent> events;

    std::size_t size() const { return events.size(); }
    bool operator==(const Cascade&) const = default;
};

/// Position of a user inside one cascade.
struct Participation {
    std::uint32_t cascade;  // index into CascadeSet::cascades()
    std::uint32_t position; // index into that cascade's events
};

/// The cascade corpus with per-user indices. Immutable after construction.
class CascadeSet {
public:
    CascadeSet() = default;

    /// Sorts events, collapses repeated participation to the earliest event and
    /// builds the indices. Throws ValidationError on event time < root time,
    /// duplicate cascade ids or out-of-range users.
    CascadeSet(std::size_t node_count, std::vector<Cascade> cascades);

    std::size_t node_count() const { return node_count_; }
    const std::vector<Cascade>& cascades() const { return cascades_; }
    std::size_t size() const { return cascades_.size(); }

    /// Indices of cascades rooted at v.
    std::span<const std::uint32_t> by_source(NodeId v) const {
        return {source_ids_.data() + source_off_[v], source_ids_.data() + source_off_[v + 1]};
    }
    /// Cascades where v has an event, in cascade order.
    std::span<const Participation> by_participant(NodeId v) const {
        return {part_.data() + part_off_[v], part_.data() + part_off_[v + 1]};
    }

private:
    std::size_t node_count_ = 0;
    std::vector<Cascade> cascades_;
    std::vector<std::uint64_t> source_off_{0};
    std::vector<std::uint32_t> source_ids_;
    std::vector<std::uint64_t> part_off_{0};
    std::vector<Participation> part_;
};

/// Sorts events by time (stable) and keeps each user's earliest event.
void normalize_events(std::vector<RetweetEvent>& events);

/// Users whose event time is strictly later than v's event; empty when v has no event.
std::vector<NodeId> retweeters_after(const Cascade& c, NodeId v);

/// Reads newline-delimited JSON:
/// `{"id": int, "root": "user-id", "t0": int, "events": [["user-id", int], ...]}`.
/// With `strict` unset, events (or whole cascades, for an unknown root) naming
/// users missing from the graph are skipped instead of raising ResolutionError.
CascadeSet load_cascades(const std::filesystem::path& path, const SocialGraph& g,
                         bool strict = true);
CascadeSet parse_cascades(std::string_view text, const SocialGraph& g, bool strict = true);
void write_cascades(const CascadeSet& d, const SocialGraph& g, const std::filesystem::path& path);

} // namespace brokerid
