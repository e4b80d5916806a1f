#include "brokerid/config_io.hpp"

#include "brokerid/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace brokerid {

void to_json(Json& j, const CentralityOptions& o) {
    j = Json{{"orientation", to_string(o.orientation)},
             {"pagerank_damping", o.pagerank.damping},
             {"pagerank_tol", o.pagerank.tol},
             {"pagerank_max_iter", o.pagerank.max_iter},
             {"betweenness_samples", o.betweenness.samples},
             {"betweenness_seed", o.betweenness.seed}};
}

void from_json(const Json& j, CentralityOptions& o) {
    o.orientation = orientation_from_string(j.value("orientation", std::string("information_flow")));
    o.pagerank.damping = j.value("pagerank_damping", o.pagerank.damping);
    o.pagerank.tol = j.value("pagerank_tol", o.pagerank.tol);
    o.pagerank.max_iter = j.value("pagerank_max_iter", o.pagerank.max_iter);
    o.betweenness.samples = j.value("betweenness_samples", o.betweenness.samples);
    o.betweenness.seed = j.value("betweenness_seed", o.betweenness.seed);
}

void to_json(Json& j, const EmbedConfig& c) {
    std::vector<std::string> base, summaries, directions;
    for (auto m : c.base_features) base.emplace_back(to_string(m));
    for (auto s : c.summaries) summaries.emplace_back(to_string(s));
    for (auto d : c.directions) directions.emplace_back(to_string(d));
    j = Json{{"base_features", base},
             {"summaries", summaries},
             {"directions", directions},
             {"lambda", c.lambda},
             {"ego_distance", c.ego_distance},
             {"bins", c.bins},
             {"bin_fraction", c.bin_fraction},
             {"centrality", c.centrality}};
}

void from_json(const Json& j, EmbedConfig& c) {
    if (j.contains("base_features")) {
        c.base_features.clear();
        for (const auto& s : j.at("base_features")) c.base_features.push_back(measure_from_string(s.get<std::string>()));
    }
    if (j.contains("summaries")) {
        c.summaries.clear();
        for (const auto& s : j.at("summaries")) c.summaries.push_back(summary_from_string(s.get<std::string>()));
    }
    if (j.contains("directions")) {
        c.directions.clear();
        for (const auto& s : j.at("directions")) c.directions.push_back(direction_from_string(s.get<std::string>()));
    }
    c.lambda = j.value("lambda", c.lambda);
    c.ego_distance = j.value("ego_distance", c.ego_distance);
    c.bins = j.value("bins", c.bins);
    c.bin_fraction = j.value("bin_fraction", c.bin_fraction);
    if (j.contains("centrality")) {
        c.centrality = j.at("centrality").get<CentralityOptions>();
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

std::string format_real(double v) {
    char buf[64];
    // %.17g always round-trips; the shorter forms are preferred when exact.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            return buf;
        }
    }
    return buf;
}

} // namespace brokerid
