#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace polariton::cli {

struct Artifact {
  std::string path;  // relative to the output directory
  std::string sha256;
};

/// Record of one CLI run, written last into the output directory.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::string output_directory;
  std::string config_text;  // input document verbatim, for re-runs
  nlohmann::json flags;
  nlohmann::json resolved_config;  // after validation and defaults, plus derived values
  std::vector<Artifact> artifacts;
  double wall_clock_seconds{};
};

inline constexpr const char* manifest_name = "manifest.json";

std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& dir);

/// Artifacts whose on-disk hash differs from the manifest (or are missing).
std::vector<std::string> verify_artifacts(const std::filesystem::path& dir,
                                          const RunManifest& manifest);

}  // namespace polariton::cli
