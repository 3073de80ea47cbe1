#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "shellpath/nonlinear_system.hpp"

namespace shellpath {

/// Sparse LU of the tangent. The symbolic analysis is kept while the sparsity pattern is unchanged.
class TangentSolver {
public:
  /// Throws SolverError when the matrix is numerically singular.
  void factorize(const Eigen::SparseMatrix<double>& K);
  Eigen::VectorXd solve(const Eigen::VectorXd& b);

private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::Index rows_ = -1, nnz_ = -1;
};

struct NewtonSettings {
  int max_iter = 25;
  double tol_rel = 0.01;
  /// Absolute floor relative to |F_int| + |kappa * F|.
  double abs_floor = 1e-12;
  /// Step halvings tried while |R| does not decrease; 0 takes full steps.
  int line_search = 10;
};

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::string message;
};

/// Force scale |F_int| + |kappa F| used for the absolute convergence floor.
double force_scale(const Linearization& lin, double kappa);

/// Newton iteration at fixed load factor. Converged when |R| <= tol_rel * reference, where the
/// reference defaults to the residual at the initial guess. Steps are halved while the residual
/// norm would grow or the state is invalid; when no halving helps the full step is taken.
/// Geometry and material failures at a taken step end the iteration unconverged; a singular
/// tangent throws SolverError.
NewtonResult newton_correct(NonlinearSystem& sys, Eigen::VectorXd& u, double kappa, const NewtonSettings& settings,
                            TangentSolver& solver, double reference = -1.0);

}  // namespace shellpath
