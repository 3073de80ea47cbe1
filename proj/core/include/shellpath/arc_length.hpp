#pragma once

#include <string>

#include <Eigen/Core>

#include "shellpath/newton.hpp"
#include "shellpath/nonlinear_system.hpp"

namespace shellpath {

struct ContinuationState {
  Eigen::VectorXd u;
  double kappa = 0.0;
  /// Current arc-length radius.
  double ds = 0.0;
  /// Increment of the last converged step; empty before the first step.
  Eigen::VectorXd du_prev;
  double dkappa_prev = 0.0;
  int step = 0;
  int branch = 0;

  static ContinuationState at_rest(int n) {
    ContinuationState s;
    s.u = Eigen::VectorXd::Zero(n);
    return s;
  }
  bool has_increment() const { return du_prev.size() > 0; }
};

struct ArcLengthSettings {
  /// Load-factor weight in the constraint |du|^2 + psi^2 dkappa^2 |F|^2 = ds^2.
  double psi = 0.0;
  int max_iter = 25;
  double tol_rel = 0.01;
  double abs_floor = 1e-12;
  /// Backtracking halvings in load-control steps (see NewtonSettings).
  int line_search = 10;
  /// Relative violation of the constraint accepted at convergence.
  double constraint_tol = 1e-8;
};

struct StepResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double reference = 0.0;
  /// |g| / ds^2 of the constraint at the returned point.
  double constraint_error = 0.0;
  std::string message;
};

/// Weighted increment norm sqrt(|du|^2 + psi^2 dkappa^2 load_norm^2).
double increment_norm(const Eigen::VectorXd& du, double dkappa, double psi, double load_norm);

/// Load-controlled step kappa -> kappa + dkappa starting from the current u.
/// On success the state is advanced and ds is set to the increment norm.
StepResult load_control_step(NonlinearSystem& sys, ContinuationState& state, double dkappa, const ArcLengthSettings& s,
                             TangentSolver& solver);

/// Arc-length step of radius ds. The predictor extrapolates the previous increment; with a
/// perturbation it is the perturbation alone and the radius becomes its norm. Corrections keep
/// the constraint exactly when its quadratic has real roots, choosing the root closest in
/// direction to the current increment. A converged increment pointing against the previous one
/// counts as a failure. On failure the state is left unchanged.
StepResult arc_length_step(NonlinearSystem& sys, ContinuationState& state, double ds, const ArcLengthSettings& s,
                           TangentSolver& solver, const Eigen::VectorXd* perturbation = nullptr);

}  // namespace shellpath
