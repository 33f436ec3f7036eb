#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pe/config.hpp"

namespace pe {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_config = 2,
  exit_nonconvergence = 3,
  exit_check_failure = 4,
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Artifact {
  /// Path relative to the output directory.
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunResult {
  int exit_code = exit_ok;
  std::string status;
  std::vector<CheckResult> checks;
  std::vector<Artifact> artifacts;
  std::string manifest_path;
  nlohmann::json manifest;
};

/// Command-line overrides applied on top of a parsed config.
struct RunOverrides {
  std::optional<RunMode> mode;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  int grid_scale = 1;
};

/// Applies overrides and re-validates (ConfigError on failure).
ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides);

/// Dispatches on config.run.mode, writes the artifacts and one manifest.json
/// into config.output.directory, and maps the outcome to an exit code.
/// Solver and check failures are reported in the result, not thrown.
RunResult run(const ExperimentConfig& config);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

} // namespace pe
