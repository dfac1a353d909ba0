#pragma once

// JSON scenario files. Malformed documents raise Error(Parse) with a
// line:column position; structurally wrong documents name the offending key.

#include <string>

#include "agentcap/model.hpp"

namespace agentcap {

Scenario parse_scenario(const std::string& text);
/// Reads and parses; an unreadable path is a Parse error naming the path.
Scenario load_scenario(const std::string& path);

/// Canonical form: keys sorted, two-space indent, doubles at round-trip precision.
std::string serialize_scenario(const Scenario& s);

/// 64-bit FNV-1a over the canonical serialization, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

} // namespace agentcap
