#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "byzlink/common.hpp"

namespace byzlink {

/// Provenance block embedded in every output file. Reruns with identical
/// inputs produce byte-identical payloads except for the timestamp field.
struct RunManifest {
    std::string subcommand;
    std::string config_hash;
    std::string tool_version = std::string(kVersion);
    std::uint64_t seed = 0;
    std::string timestamp;  // ISO-8601; excluded from byte-identity
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Hash of the canonical (sorted-key, compact) dump of a config object.
std::string config_hash_of(const nlohmann::json& config);

/// Current UTC time as ISO-8601.
std::string iso8601_now();

}  // namespace byzlink
