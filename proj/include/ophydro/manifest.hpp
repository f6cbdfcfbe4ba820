#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ophydro {

// Record of one CLI run; replaying a manifest reproduces the listed outputs
// byte-identically (the timestamp alone differs).
struct RunManifest {
  std::string command;
  nlohmann::json parameters;  // full flag set, keyed by flag name
  std::vector<std::uint64_t> seeds;
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<std::string> outputs;  // file names relative to the run directory
  int threads = 1;
  nlohmann::json tolerances;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string utc_timestamp_now();

// writes dir/manifest.json (creating dir if needed)
void write_manifest(const std::string& dir, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

}  // namespace ophydro
