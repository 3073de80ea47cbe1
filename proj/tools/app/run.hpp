#pragma once

#include <iosfwd>
#include <string>

#include "app/config.hpp"

namespace shellpath::app {

struct RunSummary {
  int rows = 0;
  int snapshots = 0;
  int failed_attempts = 0;
  bool aborted = false;
  std::string termination;
};

/// Traces the path of `b` and writes history.csv, snapshots, run.json and plot_history.py into
/// out.directory. History rows are flushed as they are produced. Progress goes to `log`.
RunSummary run_problem(const Benchmark& b, const OutputSettings& out, const nlohmann::json& invocation, std::ostream& log);

}  // namespace shellpath::app
