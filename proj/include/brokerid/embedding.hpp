#pragma once

#include "brokerid/centrality.hpp"
#include "brokerid/graph.hpp"
#include "brokerid/parallel.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brokerid {

/// Neighborhood a relational operator summarizes: in-neighbors (followers),
/// out-neighbors (followees) or their union.
enum class Direction { in, out, total };
enum class Summary { sum, mean, max };

const char* to_string(Summary s);
Summary summary_from_string(std::string_view s);
const char* to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct RelationalOp {
    Direction direction;
    Summary summary;
    bool operator==(const RelationalOp&) const = default;
};

/// A learned feature recipe: a base centrality wrapped by relational operators.
///
/// `ops` is stored outermost first. The canonical rendering writes each operator
/// as its summary name followed by `-` (in), `+` (out) or nothing (total), e.g.
/// `mean-(max(kcore))` is the in-neighbor mean of the all-neighbor max of kcore.
struct FeatureDefinition {
    Measure base = Measure::total_degree;
    std::vector<RelationalOp> ops;

    std::size_t depth() const { return ops.size(); }
    std::string to_string() const;
    static FeatureDefinition parse(std::string_view text);

    /// The recipe with the outermost operator removed.
    FeatureDefinition parent() const;

    bool operator==(const FeatureDefinition&) const = default;
};

struct EmbedConfig {
    std::vector<Measure> base_features{Measure::total_degree, Measure::betweenness,
                                       Measure::closeness, Measure::pagerank, Measure::kcore};
    std::vector<Summary> summaries{Summary::sum, Summary::max, Summary::mean};
    std::vector<Direction> directions{Direction::in, Direction::out, Direction::total};
    double lambda = 0.9;
    int ego_distance = 5;
    int bins = 10;
    double bin_fraction = 0.5;
    CentralityOptions centrality;

    /// Throws ArgumentError when a knob is out of range.
    void validate() const;
};

/// Column-major node-by-feature matrices.
struct FeatureMatrix {
    std::vector<FeatureDefinition> definitions;
    std::size_t rows = 0;
    std::vector<std::vector<double>> raw;
    std::vector<std::vector<double>> transformed;

    std::size_t cols() const { return definitions.size(); }
    std::vector<std::string> names() const;
};

/// In, out and undirected adjacency of a graph, shared across operator calls.
class RelationalGraph {
public:
    explicit RelationalGraph(const SocialGraph& g);
    const Csr& neighbors(Direction d) const;
    std::size_t node_count() const { return n_; }

private:
    std::size_t n_;
    const Csr* in_;
    const Csr* out_;
    Csr total_;
};

/// Summary of `col` over each node's neighborhood; empty neighborhoods give 0.
std::vector<double> apply_operator(const RelationalGraph& rg, std::span<const double> col,
                                   Direction dir, Summary summary, Exec exec = Exec::parallel);
std::vector<double> apply_operator(const SocialGraph& g, std::span<const double> col,
                                   Direction dir, Summary summary, Exec exec = Exec::parallel);

/// Rank-based geometric binning. Nodes are ranked ascending by value (node index
/// breaks ties); the first `bin_fraction` share goes to bin 0, the same share of
/// the remainder to bin 1, and so on, with the last bin taking the tail. Equal
/// values share the bin of their lowest-ranked member.
std::vector<double> log_bin_transform(std::span<const double> col, int bins, double bin_fraction);

/// Fraction of rows whose binned values are equal (1 for zero rows).
double binned_agreement(std::span<const double> a, std::span<const double> b);

/// Links column pairs whose binned agreement is >= lambda and keeps the
/// earliest column of each connected component. The first `frozen` columns are
/// never removed; a component holding a frozen column drops its other members.
FeatureMatrix prune_features(const FeatureMatrix& fm, double lambda, std::size_t frozen = 0);

/// Depth-0 matrix with one column per configured base feature. Vectors in
/// `precomputed` whose measure and orientation match are used instead of
/// recomputing them.
FeatureMatrix compute_base_matrix(const SocialGraph& g, const EmbedConfig& cfg,
                                  std::span<const CentralityVector> precomputed = {});

/// Layer-wise expand, bin and prune, up to `ego_distance` operator layers.
FeatureMatrix learn_features(const SocialGraph& g, const EmbedConfig& cfg,
                             std::span<const CentralityVector> precomputed = {});

/// Evaluates existing recipes on another graph. Binning is refit on the target
/// and nothing is pruned; column order follows `defs`.
FeatureMatrix transfer_features(std::span<const FeatureDefinition> defs, const SocialGraph& target,
                                const EmbedConfig& cfg,
                                std::span<const CentralityVector> precomputed = {});

/// Per-node CSV of transformed values, definition strings as headers.
void write_features_csv(const FeatureMatrix& fm, const SocialGraph& g,
                        const std::filesystem::path& path, bool transformed = true);
/// JSON sidecar `{"config": {...}, "definitions": ["...", ...]}`.
void write_definitions_json(const FeatureMatrix& fm, const EmbedConfig& cfg,
                            const std::filesystem::path& path);
/// Reads the sidecar; `cfg` (when non-null) receives the stored config.
std::vector<FeatureDefinition> read_definitions_json(const std::filesystem::path& path,
                                                     EmbedConfig* cfg = nullptr);

} // namespace brokerid
