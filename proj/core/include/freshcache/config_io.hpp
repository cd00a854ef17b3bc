#pragma once

#include <cstdint>
#include <string>

#include "freshcache/catalog.hpp"

namespace freshcache {

// Flat dotted-key config format: one `key = value` per line, `#` comments.
// Vector-valued keys take either a single scalar (broadcast over the catalog)
// or a comma-separated list; popularity additionally accepts `uniform` and
// `zipf:<z>`. See serialize_scenario for the canonical key set.
//
// Parsing reports missing/unknown/malformed keys through ConfigParseError,
// carrying the dotted key and line number.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

// Canonical serialization: fixed key order, full-precision numbers,
// popularity written out as an explicit list. parse(serialize(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

// FNV-1a over the canonical serialization; recorded in reports so outputs
// can be traced back to the exact scenario.
std::uint64_t config_fingerprint(const ScenarioConfig& config);

}  // namespace freshcache
