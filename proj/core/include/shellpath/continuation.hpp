#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shellpath/arc_length.hpp"
#include "shellpath/assembler.hpp"
#include "shellpath/stability.hpp"

namespace shellpath {

struct Measures {
  double volume = 0.0;
  double max_disp = 0.0;
  std::vector<double> probes;
};

/// Evaluated on the free unknowns of each converged state.
using MeasureFn = std::function<Measures(const Eigen::VectorXd& u)>;

struct ContinuationSettings {
  /// First increment, taken under load control.
  double dkappa0 = 0.1;
  double kappa_target = 1.0;
  double volume_target = std::numeric_limits<double>::infinity();
  /// Finish exactly on kappa_target when a step crosses it.
  bool land_on_target = true;
  int max_steps = 200;
  /// Arc-length bounds as multiples of the first increment's norm.
  double ds_min_factor = 1e-3;
  double ds_max_factor = 4.0;
  int target_iters = 5;
  ArcLengthSettings solver;
  bool check_stability = true;
  StabilitySettings stability;
  /// Refine each sign change of the kappa increment to the point where dkappa/ds = 0.
  bool locate_limits = true;
  bool branching = false;
  /// Perturbation amplitude in reference thicknesses.
  double beta = 1.0;
  double thickness = 1.0;
  /// Pressure reported per unit load factor.
  double reference_load = 1.0;
};

struct StepRecord {
  int step = 0;
  int branch = 0;
  double kappa = 0.0;
  double pressure = 0.0;
  Measures measures;
  Eigen::VectorXd eigenvalues;
  bool zero_crossing = false;
  StabilityClass classification = StabilityClass::Stable;
  /// Eigenvalues below the threshold, and those with load-orthogonal modes.
  int negative_modes = 0;
  int bifurcation_modes = 0;
  int newton_iters = 0;
  double residual = 0.0;
  double reference = 0.0;
  double ds = 0.0;
  /// Full continuation state, for restarts.
  ContinuationState state;
};

/// Bifurcation located between records[record - 1] and records[record]; mode is the critical
/// load-orthogonal eigenvector there.
struct BranchPoint {
  int record = -1;
  ContinuationState state;
  Eigen::VectorXd mode;
};

/// Limit point located between records[record - 1] and records[record].
struct LimitPoint {
  int record = -1;
  ContinuationState state;
  Measures measures;
};

struct PathHistory {
  std::vector<StepRecord> records;
  std::vector<BranchPoint> branch_points;
  std::vector<LimitPoint> limit_points;
  int failed_attempts = 0;
  int eigen_failures = 0;
  bool aborted = false;
  std::string termination;
  double ds_seed = 0.0;

  std::vector<const StepRecord*> branch(int id) const;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Branch-switch guess: u + s * mode with s = beta * thickness / |mode|_inf.
Eigen::VectorXd branch_perturbation(const Eigen::VectorXd& mode, double beta, double thickness);

/// Traces one branch from `start`, appending to `history`. With `perturbation`, the first
/// step starts from the perturbed guess.
void trace_branch(NonlinearSystem& sys, ContinuationState start, const ContinuationSettings& settings,
                  const MeasureFn& measure, PathHistory& history, const StepObserver& observer = {},
                  const Eigen::VectorXd* perturbation = nullptr);

/// Principal branch from rest, then (if enabled) the branch through the first point where a
/// load-orthogonal eigenvalue crosses zero.
PathHistory run_continuation(NonlinearSystem& sys, const ContinuationSettings& settings, const MeasureFn& measure,
                             const StepObserver& observer = {});

/// Volume of the cone from `apex`, times volume_factor, and the largest control-point displacement.
MeasureFn shell_measure(const ShellProblem& problem, const Vec3& apex = Vec3::Zero(), double volume_factor = 1.0);

}  // namespace shellpath
