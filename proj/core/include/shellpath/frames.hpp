#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "shellpath/error.hpp"

namespace shellpath {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// Position and parametric derivatives of a surface point; second derivatives are 11, 12, 22.
struct SurfaceDerivatives {
  Vec3 x = Vec3::Zero();
  std::array<Vec3, 2> d1{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 3> d2{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
};

/// How the thickness stretch follows the mid-surface: volume preserving or inextensible.
enum class ThicknessModel { Incompressible, Rigid };

struct ThicknessLayer {
  double theta3 = 0.0;
  /// Gauss weight on [-h/2, h/2] times the shell-space volume ratio.
  double weight = 0.0;
  Mat2 g_cov = Mat2::Identity();
  Mat2 g_contra = Mat2::Identity();
};

struct ReferenceFrame {
  std::array<Vec3, 2> a;
  Vec3 a3;
  double J = 0.0;
  Mat2 a_cov, a_contra, b;
  double thickness = 0.0;
  std::vector<ThicknessLayer> layers;
};

struct DeformedFrame {
  std::array<Vec3, 2> a;
  std::array<Vec3, 3> a_d;
  Vec3 a3_tilde, a3;
  double J = 0.0;
  Mat2 a_cov;
  /// a_{alpha,beta} . a3, before scaling by the thickness stretch.
  Mat2 beta;
  Mat2 b;
  double lambda3 = 1.0;
};

struct StrainState {
  Mat2 eps;
  Mat2 kappa;
};

ReferenceFrame reference_frame(const SurfaceDerivatives& geometry, double thickness, int thickness_points);

DeformedFrame deformed_frame(const ReferenceFrame& ref, const SurfaceDerivatives& current, ThicknessModel model);

StrainState strain_state(const ReferenceFrame& ref, const DeformedFrame& def);

inline Mat2 sym2(double a11, double a12, double a22) {
  Mat2 m;
  m << a11, a12, a12, a22;
  return m;
}

}  // namespace shellpath
