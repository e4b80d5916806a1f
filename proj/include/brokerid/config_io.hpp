#pragma once

#include "brokerid/embedding.hpp"

#include <json.hpp>

namespace brokerid {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const CentralityOptions& o);
void from_json(const Json& j, CentralityOptions& o);
void to_json(Json& j, const EmbedConfig& c);
void from_json(const Json& j, EmbedConfig& c);

/// Reads a whole file as JSON, raising ParseError with the path on failure.
Json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const Json& j, const std::filesystem::path& path);

/// Shortest round-trippable decimal rendering of a double.
std::string format_real(double v);

} // namespace brokerid
