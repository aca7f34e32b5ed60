#pragma once

#include "bmgame/game.hpp"
#include "bmgame/organization.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bmgame {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::json;

/// A parsed spec file. "kind" is "game" (default) or "org".
struct SpecDocument {
  std::string kind = "game";
  GameSpec game;
  OrgSpec org;
  /// Normalized input: sorted keys, explicit defaults, flat row-major G.
  Json canonical;
};

/// Parses and validates a spec document. Unknown fields are rejected.
SpecDocument parse_spec(const Json& doc);
SpecDocument load_spec(const std::string& path);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string input_hash(const Json& canonical);

/// Writes via a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// "start:stop:step" -> start + i * step for i = 0.. while <= stop (+ 1e-9 step).
std::vector<double> parse_range(const std::string& text);

/// Comma-separated policies.
Vector parse_profile(const std::string& text);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // nested rows

/// Flattens a report to "path = value" lines.
std::string render_text(const Json& report);

/// Common report header: version, command, input, input_hash, options.
Json report_header(const std::string& command, const SpecDocument& spec, const Json& options);

}  // namespace bmgame
