#include "shellpath/arc_length.hpp"

#include <algorithm>
#include <cmath>

#include "shellpath/error.hpp"

namespace shellpath {

double increment_norm(const Eigen::VectorXd& du, double dkappa, double psi, double load_norm) {
  return std::sqrt(du.squaredNorm() + psi * psi * dkappa * dkappa * load_norm * load_norm);
}

namespace {

bool try_linearize(NonlinearSystem& sys, const Eigen::VectorXd& u, double kappa, Linearization& lin, bool tangent,
                   StepResult& res) {
  try {
    sys.linearize(u, kappa, lin, tangent);
  } catch (const GeometryError& e) {
    res.message = e.what();
    return false;
  } catch (const ConstitutiveError& e) {
    res.message = e.what();
    return false;
  }
  if (!lin.residual.allFinite()) {
    res.message = "residual is not finite";
    return false;
  }
  return true;
}

}  // namespace

StepResult load_control_step(NonlinearSystem& sys, ContinuationState& state, double dkappa, const ArcLengthSettings& s,
                             TangentSolver& solver) {
  StepResult res;
  Eigen::VectorXd u = state.u;
  const NewtonSettings ns{s.max_iter, s.tol_rel, s.abs_floor, s.line_search};
  const NewtonResult nr = newton_correct(sys, u, state.kappa + dkappa, ns, solver);
  res.converged = nr.converged;
  res.iterations = nr.iterations;
  res.residual = nr.final_residual;
  res.reference = nr.initial_residual;
  res.message = nr.message;
  if (!nr.converged) return res;
  Linearization lin;
  double load_norm = 0.0;
  if (s.psi != 0.0) {
    sys.linearize(state.u, state.kappa, lin, false);
    load_norm = lin.load.norm();
  }
  state.du_prev = u - state.u;
  state.dkappa_prev = dkappa;
  state.ds = increment_norm(state.du_prev, dkappa, s.psi, load_norm);
  state.u = std::move(u);
  state.kappa += dkappa;
  ++state.step;
  return res;
}

StepResult arc_length_step(NonlinearSystem& sys, ContinuationState& state, double ds, const ArcLengthSettings& s,
                           TangentSolver& solver, const Eigen::VectorXd* perturbation) {
  if (!state.has_increment()) throw Error("arc-length step needs a previous increment");
  StepResult res;
  Linearization lin;
  double load_norm = 0.0;
  if (s.psi != 0.0) {
    if (!try_linearize(sys, state.u, state.kappa, lin, false, res)) return res;
    load_norm = lin.load.norm();
  }
  const double w = s.psi * s.psi * load_norm * load_norm;

  const double prev = increment_norm(state.du_prev, state.dkappa_prev, s.psi, load_norm);
  if (!(prev > 0.0)) throw Error("previous increment is zero");
  Eigen::VectorXd du = (ds / prev) * state.du_prev;
  double dk = (ds / prev) * state.dkappa_prev;
  if (perturbation) {
    if (perturbation->size() != du.size() || !(perturbation->norm() > 0.0))
      throw Error("perturbation must be nonzero and match the state size");
    du = *perturbation;
    dk = 0.0;
    ds = increment_norm(du, dk, s.psi, load_norm);
  }
  const double ds2 = ds * ds;

  double ref = -1.0;
  for (int it = 0;; ++it) {
    if (!try_linearize(sys, state.u + du, state.kappa + dk, lin, true, res)) return res;
    const double rn = lin.residual.norm();
    if (ref < 0.0) ref = rn;
    const double g = du.squaredNorm() + w * dk * dk - ds2;
    res.iterations = it;
    res.residual = rn;
    res.reference = ref;
    res.constraint_error = std::abs(g) / ds2;
    const double floor = s.abs_floor * force_scale(lin, state.kappa + dk);
    if (rn <= std::max(s.tol_rel * ref, floor) && res.constraint_error <= s.constraint_tol) {
      res.converged = true;
      break;
    }
    if (it == s.max_iter) {
      res.message = "arc-length corrector: no convergence in " + std::to_string(it) + " iterations";
      return res;
    }
    solver.factorize(lin.tangent);
    const Eigen::VectorXd dR = solver.solve(-lin.residual);
    const Eigen::VectorXd dF = solver.solve(lin.load);
    const Eigen::VectorXd base = du + dR;
    const double a = dF.squaredNorm() + w;
    const double b = 2.0 * (base.dot(dF) + w * dk);
    const double c = base.squaredNorm() + w * dk * dk - ds2;
    double dl;
    const double disc = b * b - 4.0 * a * c;
    if (a <= 0.0) {
      dl = b != 0.0 ? -c / b : 0.0;
    } else if (disc < 0.0) {
      dl = -b / (2.0 * a);
    } else {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double r1 = q / a, r2 = q != 0.0 ? c / q : -r1;
      auto align = [&](double r) { return du.dot(base + r * dF) + w * dk * (dk + r); };
      dl = align(r1) >= align(r2) ? r1 : r2;
    }
    du = base + dl * dF;
    dk += dl;
  }
  if (!perturbation && du.dot(state.du_prev) + w * dk * state.dkappa_prev < 0.0) {
    res.converged = false;
    res.message = "arc-length corrector reversed the path direction";
    return res;
  }
  state.u += du;
  state.kappa += dk;
  state.du_prev = std::move(du);
  state.dkappa_prev = dk;
  state.ds = ds;
  ++state.step;
  return res;
}

}  // namespace shellpath
