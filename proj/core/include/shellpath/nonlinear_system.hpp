#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace shellpath {

/// R(u, kappa) = F_int(u) - kappa * F(u) and its derivatives; dR/dkappa = -load.
struct Linearization {
  Eigen::VectorXd residual;
  Eigen::VectorXd load;
  Eigen::SparseMatrix<double> tangent;
  /// Orthonormal rigid motions restricted to the unknowns, or empty. See stability_check.
  Eigen::MatrixXd gauge;
};

/// Parameterized equilibrium problem in the free unknowns.
class NonlinearSystem {
public:
  virtual ~NonlinearSystem() = default;
  virtual int size() const = 0;
  virtual void linearize(const Eigen::VectorXd& u, double kappa, Linearization& out, bool need_tangent) = 0;
};

}  // namespace shellpath
