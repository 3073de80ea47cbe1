#pragma once

#include <vector>

#include <Eigen/Core>

#include "shellpath/patch_stencil.hpp"

namespace shellpath {

/// Basis functions of one face and their parametric derivatives at (theta1, theta2),
/// one row per stencil control point. Second-derivative columns are 11, 12, 22.
struct PatchBasis {
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  Eigen::Matrix<double, Eigen::Dynamic, 3> d2N;
  double theta1 = 0.0, theta2 = 0.0;
  /// False at (or within 2^-depth of) an extraordinary corner, where the surface is not C2.
  bool second_derivatives_reliable = true;
};

/// Parameters (theta1, theta2) are the face's own, with corner k of the face at
/// (0,0), (1,0), (1,1), (0,1) for k = 0..3.
PatchBasis evaluate_patch_basis(const PatchStencil& stencil, double theta1, double theta2);

/// Basis in slot ordering and canonical coordinates.
void regular_slot_basis(double u, double v, Eigen::VectorXd& N, Eigen::Matrix<double, Eigen::Dynamic, 2>& dN,
                        Eigen::Matrix<double, Eigen::Dynamic, 3>& d2N);
bool irregular_slot_basis(int valence, double u, double v, Eigen::VectorXd& N,
                          Eigen::Matrix<double, Eigen::Dynamic, 2>& dN, Eigen::Matrix<double, Eigen::Dynamic, 3>& d2N);

inline constexpr int kMaxIrregularDepth = 10;

struct QuadraturePoint {
  double theta1, theta2, weight;
};

/// Tensor Gauss-Legendre rule on the unit square with `points` points per direction.
std::vector<QuadraturePoint> gauss_rule_2d(int points);

/// Gauss-Legendre points and weights on [-1, 1].
void gauss_legendre(int points, std::vector<double>& x, std::vector<double>& w);

}  // namespace shellpath
