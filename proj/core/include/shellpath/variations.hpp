#pragma once

#include <Eigen/Core>

#include "shellpath/frames.hpp"
#include "shellpath/patch_basis.hpp"

namespace shellpath {

struct SecondVariation {
  Eigen::Vector3d eps = Eigen::Vector3d::Zero();
  Eigen::Vector3d kappa = Eigen::Vector3d::Zero();
  Vec3 a3_tilde = Vec3::Zero(), a3 = Vec3::Zero();
  double J = 0.0, lambda3 = 0.0;
};

/// First and second variations of the shell kinematics with respect to the control
/// point displacements of one patch; DOF r = 3*a + i moves control point a along axis i.
/// Strain-like quantities use Voigt order (11, 22, 12) with doubled shear.
class VariationSet {
public:
  VariationSet(const PatchBasis& basis, const ReferenceFrame& ref, const DeformedFrame& def, ThicknessModel model);

  int num_dofs() const { return ndof_; }

  Eigen::Matrix<double, 3, Eigen::Dynamic> eps, kappa;
  Eigen::Matrix<double, 3, Eigen::Dynamic> a3_tilde, a3;
  Eigen::RowVectorXd J, lambda3;
  /// Variation of a_{alpha,beta} . a3, order (11, 22, 12).
  Eigen::Matrix<double, 3, Eigen::Dynamic> beta;

  SecondVariation second(int r, int s) const;

  /// K(r, s) += weight * (n . d2eps_rs + m . d2kappa_rs) for all DOF pairs.
  void add_geometric_stiffness(const Eigen::Vector3d& n, const Eigen::Vector3d& m, double weight, Eigen::MatrixXd& K) const;

private:
  int ndof_;
  const PatchBasis* basis_;
  const DeformedFrame* def_;
  double Jref_;
  bool incompressible_;
};

}  // namespace shellpath
