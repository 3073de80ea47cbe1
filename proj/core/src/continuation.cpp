#include "shellpath/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "shellpath/error.hpp"
#include "shellpath/volume.hpp"

namespace shellpath {

std::vector<const StepRecord*> PathHistory::branch(int id) const {
  std::vector<const StepRecord*> out;
  for (const StepRecord& r : records)
    if (r.branch == id) out.push_back(&r);
  return out;
}

Eigen::VectorXd branch_perturbation(const Eigen::VectorXd& mode, double beta, double thickness) {
  const double m = mode.cwiseAbs().maxCoeff();
  if (!(m > 0.0)) throw Error("branch switch needs a nonzero mode");
  return (beta * thickness / m) * mode;
}

namespace {

bool target_reached(const ContinuationSettings& s, const ContinuationState& st, const Measures& m) {
  return st.kappa >= s.kappa_target || m.volume >= s.volume_target;
}

StepRecord make_record(NonlinearSystem& sys, const ContinuationState& st, const ContinuationSettings& s,
                       const MeasureFn& measure, const StepResult& res, PathHistory& h, StabilityReport* rep_out) {
  StepRecord r;
  r.step = st.step;
  r.branch = st.branch;
  r.kappa = st.kappa;
  r.pressure = st.kappa * s.reference_load;
  r.measures = measure(st.u);
  r.newton_iters = res.iterations;
  r.residual = res.residual;
  r.reference = res.reference;
  r.ds = st.ds;
  r.state = st;
  if (s.check_stability) {
    Linearization lin;
    sys.linearize(st.u, st.kappa, lin, true);
    StabilityReport rep = stability_check(lin.tangent, s.stability, lin.load, lin.gauge);
    if (!rep.ok) ++h.eigen_failures;
    r.eigenvalues = rep.eigenvalues;
    r.zero_crossing = rep.zero_crossing;
    r.classification = rep.classification;
    r.negative_modes = rep.negative;
    r.bifurcation_modes = rep.negative_orthogonal;
    if (rep_out) *rep_out = std::move(rep);
  }
  return r;
}

struct OrthogonalMode {
  bool found = false;
  double value = 0.0;
  Eigen::VectorXd vector;
};

// The index-th smallest eigenpair (ascending) whose mode is orthogonal to the load.
OrthogonalMode orthogonal_mode(NonlinearSystem& sys, const ContinuationState& st, const StabilitySettings& ss,
                               int index) {
  Linearization lin;
  sys.linearize(st.u, st.kappa, lin, true);
  const StabilityReport rep = stability_check(lin.tangent, ss, lin.load, lin.gauge);
  OrthogonalMode m;
  if (!rep.ok) return m;
  int seen = 0;
  for (Eigen::Index e = 0; e < rep.eigenvalues.size(); ++e) {
    if (rep.alignments[e] > ss.alignment_tol) continue;
    if (seen++ == index) {
      m.found = true;
      m.value = rep.eigenvalues[e];
      m.vector = rep.eigenvectors.col(e);
      break;
    }
  }
  return m;
}

// Root of value() along the arc from `from` to the step `to`, by regula falsi (Illinois) on the
// arc-length fraction. value(from) > 0 > value(to); returns the last state with a non-positive value.
ContinuationState arc_root(NonlinearSystem& sys, const ContinuationState& from, const ContinuationState& to,
                           const ContinuationSettings& s, TangentSolver& solver, double fa, double fb,
                           const std::function<std::optional<double>(const ContinuationState&)>& value) {
  ContinuationState best = to;
  double a = 0.0, b = 1.0;
  const double tol = 1e-3 * (fa - fb);
  int side = 0;
  for (int it = 0; it < 16 && std::abs(fb) > tol && std::abs(fa) > tol; ++it) {
    const double theta = (a * fb - b * fa) / (fb - fa);
    ContinuationState trial = from;
    const StepResult res = arc_length_step(sys, trial, theta * to.ds, s.solver, solver);
    if (!res.converged) break;
    const std::optional<double> v = value(trial);
    if (!v) break;
    if (*v > 0.0) {
      a = theta;
      fa = *v;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = theta;
      fb = *v;
      best = trial;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (std::abs(*v) <= tol) {
      best = std::move(trial);
      break;
    }
  }
  return best;
}

BranchPoint locate_branch_point(NonlinearSystem& sys, const ContinuationState& from, const ContinuationState& to,
                                const ContinuationSettings& s, int index, int record, TangentSolver& solver) {
  BranchPoint bp{record, to, {}};
  const OrthogonalMode m0 = orthogonal_mode(sys, from, s.stability, index);
  const OrthogonalMode m1 = orthogonal_mode(sys, to, s.stability, index);
  if (!m1.found) return bp;
  bp.mode = m1.vector;
  if (!m0.found || !(m0.value > 0.0) || !(m1.value < m0.value)) return bp;
  bp.state = arc_root(sys, from, to, s, solver, m0.value, m1.value,
                      [&](const ContinuationState& st) -> std::optional<double> {
                        const OrthogonalMode m = orthogonal_mode(sys, st, s.stability, index);
                        if (!m.found) return std::nullopt;
                        return m.value;
                      });
  const OrthogonalMode m = orthogonal_mode(sys, bp.state, s.stability, index);
  if (m.found) bp.mode = m.vector;
  return bp;
}

// Rate of kappa along the path direction d, up to a positive factor: with K w = F the tangent is
// (w, 1) dkappa, oriented along d. Continuous through limit points, where it changes sign.
std::optional<double> kappa_rate(NonlinearSystem& sys, const ContinuationState& st, const Eigen::VectorXd& d,
                                 TangentSolver& solver) {
  Linearization lin;
  try {
    sys.linearize(st.u, st.kappa, lin, true);
    solver.factorize(lin.tangent);
    const Eigen::VectorXd w = solver.solve(lin.load);
    return w.dot(d) / (d.norm() * (w.squaredNorm() + 1.0));
  } catch (const Error&) {
    return std::nullopt;
  }
}

// The sign of the kappa increment flipped between st and next. The maximum lies between st and
// next, or between the state before st and st when st is already past it.
std::optional<LimitPoint> locate_limit_point(NonlinearSystem& sys, const ContinuationState* before,
                                             const ContinuationState& st, const ContinuationState& next,
                                             const ContinuationSettings& s, int record, TangentSolver& solver) {
  const double sign = st.dkappa_prev > 0.0 ? 1.0 : -1.0;
  const Eigen::VectorXd d = next.u - (before ? before->u : st.u);
  auto rate = [&](const ContinuationState& x) -> std::optional<double> {
    const auto v = kappa_rate(sys, x, d, solver);
    if (!v) return std::nullopt;
    return sign * *v;
  };
  const auto fm = rate(st);
  if (!fm) return std::nullopt;
  const ContinuationState* from = &st;
  const ContinuationState* to = &next;
  std::optional<double> fa = fm, fb = rate(next);
  if (*fm <= 0.0 && before && before->has_increment()) {
    from = before;
    to = &st;
    fa = rate(*before);
    fb = fm;
    --record;
  }
  if (!fa || !fb) return std::nullopt;
  LimitPoint lp{record, *to, {}};
  if (*fa > 0.0 && *fb < 0.0) lp.state = arc_root(sys, *from, *to, s, solver, *fa, *fb, rate);
  return lp;
}

// Load-control increment dk from st. When the full increment fails it is reached through
// substeps; only the final state is returned, with the whole increment as du_prev.
StepResult first_increment(NonlinearSystem& sys, ContinuationState& st, double dk, const ArcLengthSettings& s,
                           TangentSolver& solver, int& failures) {
  ContinuationState sub = st;
  StepResult res = load_control_step(sys, sub, dk, s, solver);
  if (!res.converged) {
    ++failures;
    sub = st;
    double done = 0.0, h = 0.5 * dk;
    while (std::abs(done) < std::abs(dk)) {
      ContinuationState trial = sub;
      res = load_control_step(sys, trial, h, s, solver);
      if (!res.converged) {
        ++failures;
        h *= 0.5;
        if (std::abs(h) < 1e-6 * std::abs(dk)) return res;
        continue;
      }
      sub = std::move(trial);
      done += h;
      const double left = dk - done;
      h = std::abs(2.0 * h) < std::abs(left) ? 2.0 * h : left;
    }
    sub.kappa = st.kappa + dk;
  }
  Linearization lin;
  double load_norm = 0.0;
  if (s.psi != 0.0) {
    sys.linearize(st.u, st.kappa, lin, false);
    load_norm = lin.load.norm();
  }
  sub.du_prev = sub.u - st.u;
  sub.dkappa_prev = dk;
  sub.ds = increment_norm(sub.du_prev, dk, s.psi, load_norm);
  sub.step = st.step + 1;
  st = std::move(sub);
  return res;
}

}  // namespace

void trace_branch(NonlinearSystem& sys, ContinuationState st, const ContinuationSettings& s, const MeasureFn& measure,
                  PathHistory& h, const StepObserver& observer, const Eigen::VectorXd* perturbation) {
  TangentSolver solver;
  auto push = [&](StepRecord&& r) {
    h.records.push_back(std::move(r));
    if (observer) observer(h.records.back());
  };
  int prev_bif = 0;
  if (!h.records.empty()) prev_bif = h.records.back().bifurcation_modes;
  if (!st.has_increment() && st.step == 0 && perturbation == nullptr) {
    StabilityReport rep;
    StepRecord r = make_record(sys, st, s, measure, StepResult{true}, h, &rep);
    prev_bif = r.bifurcation_modes;
    push(std::move(r));
    if (target_reached(s, st, h.records.back().measures)) {
      h.termination = "target reached";
      return;
    }
  }

  double ds = st.ds;
  double ds_min = h.ds_seed * s.ds_min_factor, ds_max = h.ds_seed * s.ds_max_factor;
  int taken = 0;
  while (taken < s.max_steps) {
    ContinuationState next = st;
    StepResult res;
    const Eigen::VectorXd* switched = nullptr;
    if (!next.has_increment()) {
      const double dk = std::min(s.dkappa0, s.kappa_target - st.kappa);
      res = first_increment(sys, next, dk, s.solver, solver, h.failed_attempts);
      if (!res.converged) {
        h.aborted = true;
        h.termination = "first increment failed: " + res.message;
        return;
      }
      if (h.ds_seed <= 0.0) h.ds_seed = next.ds;
      ds_min = h.ds_seed * s.ds_min_factor;
      ds_max = h.ds_seed * s.ds_max_factor;
      ds = next.ds;
    } else {
      switched = perturbation;
      res = arc_length_step(sys, next, ds, s.solver, solver, perturbation);
      if (!res.converged) {
        ++h.failed_attempts;
        ds *= 0.5;
        if (ds < ds_min) {
          h.aborted = true;
          h.termination = (perturbation ? "branch switch" : "step " + std::to_string(st.step + 1)) +
                          " failed at minimum arc length: " + res.message;
          return;
        }
        continue;
      }
      perturbation = nullptr;
    }

    if (s.land_on_target && next.kappa > s.kappa_target && st.kappa < s.kappa_target) {
      ContinuationState land = st;
      const double t = (s.kappa_target - st.kappa) / (next.kappa - st.kappa);
      land.u = st.u + t * (next.u - st.u);
      const NewtonSettings ns{s.solver.max_iter, s.solver.tol_rel, s.solver.abs_floor, s.solver.line_search};
      const NewtonResult nr = newton_correct(sys, land.u, s.kappa_target, ns, solver);
      if (nr.converged) {
        land.du_prev = land.u - st.u;
        land.dkappa_prev = s.kappa_target - st.kappa;
        land.kappa = s.kappa_target;
        land.ds = next.ds;
        land.step = next.step;
        next = std::move(land);
        res.iterations = nr.iterations;
        res.residual = nr.final_residual;
        res.reference = nr.initial_residual;
      }
    }

    ++taken;
    StabilityReport rep;
    StepRecord r = make_record(sys, next, s, measure, res, h, &rep);
    if (s.locate_limits && switched == nullptr && st.has_increment() && st.dkappa_prev * next.dkappa_prev < 0.0) {
      const std::size_t n = h.records.size();
      const ContinuationState* before =
          n >= 2 && h.records[n - 2].branch == st.branch ? &h.records[n - 2].state : nullptr;
      if (auto lp = locate_limit_point(sys, before, h.records.back().state, next, s, static_cast<int>(n), solver)) {
        lp->measures = measure(lp->state.u);
        h.limit_points.push_back(std::move(*lp));
      }
    }
    if (s.branching && st.branch == 0 && h.branch_points.empty() && rep.ok && r.bifurcation_modes > prev_bif &&
        st.has_increment()) {
      BranchPoint bp = locate_branch_point(sys, st, next, s, prev_bif, static_cast<int>(h.records.size()), solver);
      if (bp.mode.size() > 0) h.branch_points.push_back(std::move(bp));
    }
    prev_bif = r.bifurcation_modes;
    push(std::move(r));
    st = std::move(next);
    if (target_reached(s, st, h.records.back().measures)) {
      h.termination = "target reached";
      return;
    }
    const double f = std::sqrt(static_cast<double>(s.target_iters) / std::max(res.iterations, 1));
    ds = std::clamp(ds * f, ds_min, ds_max);
    st.ds = ds;
  }
  h.termination = "step limit";
}

PathHistory run_continuation(NonlinearSystem& sys, const ContinuationSettings& s, const MeasureFn& measure,
                             const StepObserver& observer) {
  PathHistory h;
  trace_branch(sys, ContinuationState::at_rest(sys.size()), s, measure, h, observer);
  if (s.branching && !h.branch_points.empty()) {
    const std::string principal = h.termination;
    const bool principal_aborted = h.aborted;
    h.aborted = false;
    const BranchPoint bp = h.branch_points.front();
    ContinuationState start = bp.state;
    start.branch = 1;
    const Eigen::VectorXd p = branch_perturbation(bp.mode, s.beta, s.thickness);
    trace_branch(sys, start, s, measure, h, observer, &p);
    h.termination = "principal: " + principal + "; branch 1: " + h.termination;
    h.aborted = h.aborted || principal_aborted;
  }
  return h;
}

MeasureFn shell_measure(const ShellProblem& problem, const Vec3& apex, double volume_factor) {
  return [&problem, apex, volume_factor](const Eigen::VectorXd& u) {
    Measures m;
    const Eigen::VectorXd full = problem.dofs().expand(u);
    m.volume = volume_factor * enclosed_volume(problem.discretization(), full, apex);
    for (Eigen::Index v = 0; v < full.size() / 3; ++v) m.max_disp = std::max(m.max_disp, full.segment<3>(3 * v).norm());
    return m;
  };
}

}  // namespace shellpath
