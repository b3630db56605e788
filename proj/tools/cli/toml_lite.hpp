#pragma once

#include <string_view>

#include <json.hpp>

namespace dopclust::cli {

// Parses the subset of TOML used by pipeline configs into a JSON object:
// [table] and [dotted.table] headers, bare and dotted keys, basic and literal
// strings, integers, floats, booleans, and (possibly multi-line) arrays of
// those. Inline tables, dates and multi-line strings are rejected.
nlohmann::ordered_json parse_toml(std::string_view text);

}  // namespace dopclust::cli
