#include "ophydro/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include "ophydro/config.hpp"
#include "ophydro/csv.hpp"
#include "ophydro/errors.hpp"

namespace ophydro {

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["seeds"] = m.seeds;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  j["outputs"] = m.outputs;
  j["threads"] = m.threads;
  j["tolerances"] = m.tolerances;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.parameters = j.at("parameters");
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.threads = j.at("threads").get<int>();
  m.tolerances = j.at("tolerances");
  return m;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

void write_manifest(const std::string& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / "manifest.json").string();
  write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("manifest parse error: ") + e.what());
  }
  try {
    return manifest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("manifest field error: ") + e.what());
  }
}

}  // namespace ophydro
