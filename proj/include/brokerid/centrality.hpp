#pragma once

#include "brokerid/graph.hpp"
#include "brokerid/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace brokerid {

enum class Measure { in_degree, out_degree, total_degree, closeness, betweenness, pagerank, kcore };

const char* to_string(Measure m);
Measure measure_from_string(std::string_view s);

struct CentralityVector {
    Measure measure;
    Orientation orientation;
    std::vector<double> values;
};

enum class DegreeKind { in, out, total };

struct PageRankParams {
    double damping = 0.85;
    double tol = 1e-8;
    int max_iter = 200;
};

struct BetweennessParams {
    /// 0 = exact Brandes over all sources; otherwise the number of sampled pivots.
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct CentralityOptions {
    Orientation orientation = Orientation::information_flow;
    PageRankParams pagerank;
    BetweennessParams betweenness;
    Exec exec = Exec::parallel;
};

/// Raw neighbor counts under the orientation (total = in + out).
CentralityVector degree(const SocialGraph& g, DegreeKind kind,
                        Orientation o = Orientation::information_flow);

/// Harmonic closeness: sum over reachable v != u of 1/d(u, v) along out-edges.
CentralityVector closeness(const SocialGraph& g, Orientation o = Orientation::information_flow,
                           Exec exec = Exec::parallel);

/// Unnormalized directed betweenness via Brandes' dependency accumulation.
/// With sampled pivots the pivot sum is scaled by n / samples.
///
/// The parallel kernel splits sources into a fixed number of contiguous blocks
/// that does not depend on the worker count, accumulates each block in source
/// order and combines blocks in block order, so results are bit-identical for
/// any thread count.
CentralityVector betweenness(const SocialGraph& g, Orientation o = Orientation::information_flow,
                             BetweennessParams params = {}, Exec exec = Exec::parallel);

/// Power iteration with uniform teleport and dangling-mass redistribution.
/// Throws ConvergenceError (carrying the L1 residual) after max_iter sweeps.
CentralityVector pagerank(const SocialGraph& g, Orientation o = Orientation::information_flow,
                          PageRankParams params = {}, Exec exec = Exec::parallel);

/// Core numbers by bucket peeling on the undirected projection.
CentralityVector kcore(const SocialGraph& g);

CentralityVector compute_centrality(const SocialGraph& g, Measure m,
                                    const CentralityOptions& opts = {});

/// Wide per-node CSV: `user,<measure>,<measure>...`.
void write_centrality_csv(const std::vector<CentralityVector>& cols, const SocialGraph& g,
                          const std::filesystem::path& path);
/// Reads the wide CSV back in node order of `g`.
std::vector<CentralityVector> read_centrality_csv(const std::filesystem::path& path,
                                                  const SocialGraph& g,
                                                  Orientation o = Orientation::information_flow);
/// Long CSV: `user,measure,value`.
void write_centrality_long_csv(const std::vector<CentralityVector>& cols, const SocialGraph& g,
                               const std::filesystem::path& path);

} // namespace brokerid
