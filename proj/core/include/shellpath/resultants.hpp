#pragma once

#include <Eigen/Core>

#include "shellpath/frames.hpp"
#include "shellpath/material.hpp"

namespace shellpath {

/// Thickness-integrated force and moment resultants (Voigt 11, 22, 12) and their
/// tangents with respect to membrane strain and curvature change (Voigt with doubled shear).
struct StressResultants {
  Eigen::Vector3d n = Eigen::Vector3d::Zero(), m = Eigen::Vector3d::Zero();
  Eigen::Matrix3d Dnn = Eigen::Matrix3d::Zero(), Dnm = Eigen::Matrix3d::Zero(), Dmm = Eigen::Matrix3d::Zero();
  /// Strain energy per unit reference mid-surface area.
  double energy = 0.0;
};

StressResultants stress_resultants(const MaterialParams& params, const ReferenceFrame& ref, const StrainState& strain);

inline Eigen::Vector3d to_voigt_strain(const Mat2& e) { return {e(0, 0), e(1, 1), 2.0 * e(0, 1)}; }
inline Eigen::Vector3d to_voigt_stress(const Mat2& s) { return {s(0, 0), s(1, 1), s(0, 1)}; }

}  // namespace shellpath
