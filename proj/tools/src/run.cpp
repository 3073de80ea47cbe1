#include "app/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <Eigen/Core>

#include "app/output.hpp"
#include "shellpath/error.hpp"

#ifndef SHELLPATH_VERSION
#define SHELLPATH_VERSION "unknown"
#endif

namespace shellpath::app {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

RunSummary run_problem(const Benchmark& b, const OutputSettings& out, const nlohmann::json& invocation,
                       std::ostream& log) {
  const fs::path dir = out.directory;
  fs::create_directories(dir);

  Discretization disc(b.mesh, b.shell);
  ShellProblem problem(disc, build_dof_map(disc.mesh(), b.constraints), b.reference_pressure);
  problem.set_rigid_metric(b.rigid_metric);
  const MeasureFn measure = shell_measure(problem, b.apex, b.volume_factor);
  const double v0 = measure(Eigen::VectorXd::Zero(problem.size())).volume;
  ContinuationSettings cs = b.continuation;
  if (b.volume_ratio_target > 0.0) cs.volume_target = b.volume_ratio_target * v0;
  const int modes = cs.check_stability ? cs.stability.modes : 0;

  log << b.name << ": " << disc.num_elements() << " elements, " << problem.size() << " free dofs, volume " << v0
      << '\n';

  RunSummary sum;
  HistoryWriter history((dir / "history.csv").string(), modes);
  int last_snapshot = -1;
  auto snapshot = [&](const StepRecord& r, int row) {
    const Eigen::VectorXd u = problem.dofs().expand(r.state.u);
    const std::string title = b.name + " step " + std::to_string(r.step) + " branch " + std::to_string(r.branch);
    std::ofstream s(dir / snapshot_name(row), std::ios::binary);
    write_surface_vtk(s, sample_surface(disc, u, out.resolution), title);
    std::ofstream c(dir / control_snapshot_name(row), std::ios::binary);
    write_control_vtk(c, disc.mesh(), u, title);
    last_snapshot = row;
    ++sum.snapshots;
  };
  const StepObserver observer = [&](const StepRecord& r) {
    const int row = history.rows();
    history.append(r);
    if (out.snapshot_every > 0 && row % out.snapshot_every == 0) snapshot(r, row);
    char line[160];
    std::snprintf(line, sizeof line, "step %4d branch %d  p %-12.6g V %-12.6g max|u| %-10.4g iters %d\n", r.step,
                  r.branch, r.pressure, r.measures.volume, r.measures.max_disp, r.newton_iters);
    log << line << std::flush;
  };

  PathHistory h;
  try {
    h = run_continuation(problem, cs, measure, observer);
  } catch (const Error& e) {
    h.aborted = true;
    h.termination = e.what();
  }
  sum.rows = history.rows();
  sum.failed_attempts = h.failed_attempts;
  sum.aborted = h.aborted;
  sum.termination = h.termination;
  if (!h.records.empty() && last_snapshot != sum.rows - 1) snapshot(h.records.back(), sum.rows - 1);

  nlohmann::json branch_points = nlohmann::json::array();
  for (const BranchPoint& bp : h.branch_points)
    branch_points.push_back({{"record", bp.record}, {"kappa", bp.state.kappa}, {"pressure", bp.state.kappa * cs.reference_load}});
  nlohmann::json limit_points = nlohmann::json::array();
  for (const LimitPoint& lp : h.limit_points)
    limit_points.push_back({{"record", lp.record},
                            {"kappa", lp.state.kappa},
                            {"pressure", lp.state.kappa * cs.reference_load},
                            {"volume", lp.measures.volume}});
  const nlohmann::json record{
      {"tool", "shellpath"},
      {"version", SHELLPATH_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
      {"invocation", invocation},
      {"config", describe(b, out)},
      {"reference_volume", v0},
      {"history", {{"file", "history.csv"}, {"schema", kHistoryVersion}, {"columns", history_header(modes)}}},
      {"result",
       {{"rows", sum.rows},
        {"snapshots", sum.snapshots},
        {"failed_attempts", h.failed_attempts},
        {"eigen_failures", h.eigen_failures},
        {"branch_points", branch_points},
        {"limit_points", limit_points},
        {"aborted", h.aborted},
        {"termination", h.termination}}},
  };
  write_file(dir / "run.json", record.dump(2) + "\n");
  write_file(dir / "plot_history.py", plot_script("history.csv"));
  fs::permissions(dir / "plot_history.py", fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                  fs::perm_options::add);
  log << "termination: " << h.termination << " (" << h.failed_attempts << " failed attempts)\n";
  return sum;
}

}  // namespace shellpath::app
