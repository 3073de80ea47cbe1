#pragma once

#include <string>

#include <Eigen/Core>

#include "shellpath/frames.hpp"

namespace shellpath {

enum class MaterialKind { MooneyRivlin, StVenantKirchhoff };

/// Mooney-Rivlin uses c1, c2 (incompressible, c2 = 0 is neo-Hookean);
/// St. Venant-Kirchhoff uses Young's modulus and Poisson's ratio in plane stress.
struct MaterialParams {
  MaterialKind kind = MaterialKind::MooneyRivlin;
  double c1 = 0.0, c2 = 0.0;
  double young = 0.0, poisson = 0.0;

  static MaterialParams mooney_rivlin(double c1, double c2) { return {MaterialKind::MooneyRivlin, c1, c2, 0.0, 0.0}; }
  static MaterialParams neo_hookean(double c1) { return mooney_rivlin(c1, 0.0); }
  static MaterialParams st_venant_kirchhoff(double E, double nu) { return {MaterialKind::StVenantKirchhoff, 0.0, 0.0, E, nu}; }

  ThicknessModel thickness_model() const {
    return kind == MaterialKind::MooneyRivlin ? ThicknessModel::Incompressible : ThicknessModel::Rigid;
  }
  /// Small-strain shear modulus.
  double shear_modulus() const;
  void validate() const;
  std::string describe() const;
};

/// In-plane second Piola-Kirchhoff stress, condensed tangent in Voigt order (11, 22, 12),
/// the pressure-like multiplier and the reconstructed transverse stress S^33.
struct MaterialResponse {
  Mat2 S = Mat2::Zero();
  Eigen::Matrix3d tangent = Eigen::Matrix3d::Zero();
  double p_tilde = 0.0;
  double s33 = 0.0;
  double energy = 0.0;
};

/// G_contra is the reference contravariant in-plane metric, C_cov the current in-plane
/// metric, lambda3 the thickness stretch (ignored by St. Venant-Kirchhoff).
MaterialResponse material_response(const MaterialParams& params, const Mat2& G_contra, const Mat2& C_cov, double lambda3);

}  // namespace shellpath
