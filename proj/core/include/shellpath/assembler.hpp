#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "shellpath/discretization.hpp"
#include "shellpath/dof_map.hpp"
#include "shellpath/nonlinear_system.hpp"

namespace shellpath {

/// Global vectors are indexed by DOF 3*v + i. `tangent` is dF_int/du - pressure * dF_p/du.
struct AssembledSystem {
  Eigen::VectorXd internal_force;
  /// Follower pressure load per unit pressure; equals dV/du for the enclosed volume.
  Eigen::VectorXd pressure_force;
  Eigen::SparseMatrix<double> tangent;
  double energy = 0.0;
};

struct ElementContribution {
  Eigen::VectorXd internal_force, pressure_force;
  Eigen::MatrixXd stiffness, pressure_stiffness;
  double energy = 0.0;
};

/// Internal force, pressure load and their tangents for one element.
void element_contribution(const Discretization& disc, int e, const Eigen::MatrixXd& displacement,
                          ElementContribution& out, bool need_tangent);

class Assembler {
public:
  explicit Assembler(const Discretization& disc);

  const Discretization& discretization() const { return *disc_; }

  /// Element results are accumulated in element order, so the result does not depend on threading.
  void assemble(const Eigen::VectorXd& u, double pressure, AssembledSystem& out, bool need_tangent = true) const;

  /// Sparsity pattern of the global tangent (values zero).
  const Eigen::SparseMatrix<double>& pattern() const { return pattern_; }

private:
  const Discretization* disc_;
  Eigen::SparseMatrix<double> pattern_;
  std::vector<std::vector<int>> slots_;
};

/// Orthonormal basis (3N x 6) of the translations and infinitesimal rotations of the displaced control net.
Eigen::MatrixXd rigid_motions(const ControlMesh& mesh, const Eigen::VectorXd& displacement);

/// The shell equilibrium problem restricted to the free DOFs, loaded by kappa * reference_pressure.
class ShellProblem : public NonlinearSystem {
public:
  ShellProblem(const Discretization& disc, DofMap dofs, double reference_pressure);

  int size() const override { return dofs_.num_free(); }
  void linearize(const Eigen::VectorXd& u, double kappa, Linearization& out, bool need_tangent) override;

  const DofMap& dofs() const { return dofs_; }
  const Discretization& discretization() const { return assembler_.discretization(); }
  double reference_pressure() const { return p_ref_; }
  const AssembledSystem& last_assembly() const { return full_; }
  int assemblies() const { return count_; }
  /// Fill Linearization::gauge so that eigenvalues ignore the rigid motion removed by the constraints.
  void set_rigid_metric(bool on) { rigid_metric_ = on; }
  bool rigid_metric() const { return rigid_metric_; }

private:
  Assembler assembler_;
  DofMap dofs_;
  double p_ref_;
  AssembledSystem full_;
  Eigen::SparseMatrix<double> reduced_pattern_;
  std::vector<int> reduced_slot_;
  int count_ = 0;
  bool rigid_metric_ = false;
};

}  // namespace shellpath
