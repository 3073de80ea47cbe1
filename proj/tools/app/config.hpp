#pragma once

#include <string>

#include "json.hpp"

#include "app/benchmarks.hpp"

namespace shellpath::app {

struct OutputSettings {
  std::string directory = "out";
  /// Snapshot every n-th history row; 0 writes only the last one.
  int snapshot_every = 10;
  /// Sample cells per element edge in surface snapshots.
  int resolution = 4;
};

struct RunConfig {
  Benchmark problem;
  OutputSettings output;
};

/// Parses a run configuration (YAML). `source` prefixes error messages and anchors relative
/// mesh paths. Errors are ConfigError with "source:line:column: " positions.
RunConfig parse_run_config(const std::string& text, const std::string& source);
RunConfig load_run_config(const std::string& path);

/// Resolved settings of a run, as recorded in run.json.
nlohmann::json describe(const Benchmark& b, const OutputSettings& out);

}  // namespace shellpath::app
