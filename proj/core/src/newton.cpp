#include "shellpath/newton.hpp"

#include <algorithm>
#include <cmath>

#include "shellpath/error.hpp"

namespace shellpath {

void TangentSolver::factorize(const Eigen::SparseMatrix<double>& K) {
  if (!K.isCompressed()) throw SolverError("tangent must be compressed");
  if (K.rows() != rows_ || K.nonZeros() != nnz_) {
    lu_.analyzePattern(K);
    rows_ = K.rows();
    nnz_ = K.nonZeros();
  }
  lu_.factorize(K);
  if (lu_.info() != Eigen::Success) throw SolverError("tangent factorization failed: " + lu_.lastErrorMessage());
}

Eigen::VectorXd TangentSolver::solve(const Eigen::VectorXd& b) {
  Eigen::VectorXd x = lu_.solve(b);
  if (lu_.info() != Eigen::Success || !x.allFinite()) throw SolverError("tangent solve failed");
  return x;
}

double force_scale(const Linearization& lin, double kappa) {
  const Eigen::VectorXd fint = lin.residual + kappa * lin.load;
  return fint.norm() + std::abs(kappa) * lin.load.norm();
}

NewtonResult newton_correct(NonlinearSystem& sys, Eigen::VectorXd& u, double kappa, const NewtonSettings& settings,
                            TangentSolver& solver, double reference) {
  NewtonResult res;
  Linearization lin;
  Eigen::VectorXd x = u;
  try {
    sys.linearize(x, kappa, lin, true);
  } catch (const GeometryError& e) {
    res.message = e.what();
    return res;
  } catch (const ConstitutiveError& e) {
    res.message = e.what();
    return res;
  }
  res.initial_residual = lin.residual.norm();
  const double ref = reference >= 0.0 ? reference : res.initial_residual;
  for (int it = 0;; ++it) {
    const double rn = lin.residual.norm();
    res.final_residual = rn;
    res.iterations = it;
    if (!std::isfinite(rn)) {
      res.message = "residual is not finite";
      return res;
    }
    if (rn <= std::max(settings.tol_rel * ref, settings.abs_floor * force_scale(lin, kappa))) {
      res.converged = true;
      u = x;
      return res;
    }
    if (it == settings.max_iter) {
      res.message = "no convergence in " + std::to_string(it) + " iterations";
      return res;
    }
    solver.factorize(lin.tangent);
    const Eigen::VectorXd dx = solver.solve(lin.residual);
    double alpha = 1.0;
    for (int k = 0; k < settings.line_search; ++k) {
      Linearization trial;
      bool better = false;
      try {
        sys.linearize(x - alpha * dx, kappa, trial, false);
        better = trial.residual.allFinite() && trial.residual.norm() < rn;
      } catch (const GeometryError&) {
      } catch (const ConstitutiveError&) {
      }
      if (better) break;
      alpha *= 0.5;
    }
    if (alpha < std::ldexp(1.0, -settings.line_search + 1)) alpha = 1.0;
    x -= alpha * dx;
    try {
      sys.linearize(x, kappa, lin, true);
    } catch (const GeometryError& e) {
      res.message = e.what();
      return res;
    } catch (const ConstitutiveError& e) {
      res.message = e.what();
      return res;
    }
  }
}

}  // namespace shellpath
