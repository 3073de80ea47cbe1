#pragma once

#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace shellpath {

enum class StabilityClass { Stable, LimitLike, BifurcationLike };

const char* to_string(StabilityClass c);

struct StabilitySettings {
  int modes = 6;
  /// Zero-crossing threshold relative to the mean diagonal of K.
  double zero_tol = 1e-6;
  /// Lowest mode counts as load-aligned when |u_e . F| / |F| exceeds this.
  double alignment_tol = 1e-3;
  /// Largest size solved densely; larger systems use block inverse iteration.
  int dense_limit = 3000;
  int max_iter = 500;
};

struct StabilityReport {
  /// Ascending; unit eigenvectors in the columns of `eigenvectors`.
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double threshold = 0.0;
  bool zero_crossing = false;
  StabilityClass classification = StabilityClass::Stable;
  /// |u_e . F| / |F| per mode; load_alignment is that of the lowest mode.
  Eigen::VectorXd alignments;
  double load_alignment = 0.0;
  /// Modes below the threshold, and those among them orthogonal to the load.
  int negative = 0;
  int negative_orthogonal = 0;
  bool ok = true;
  std::string diagnostics;
};

/// Smallest eigenpairs of the symmetric part of K. `load` (optional) classifies the modes.
/// Eigenvector signs are fixed so that the entry of largest magnitude is positive.
///
/// With a nonempty `gauge` U (orthonormal columns of a rigid-motion basis, restricted to the unknowns), the
/// problem is K z = lambda (I - U U^T) z: the norm of z is that of the rigid-motion-free displacement it
/// represents. The inertia of K is unchanged, but symmetric pairs are no longer split by the constraints that
/// only remove rigid motion. Eigenvectors are then scaled to unit length but not mutually orthogonal.
StabilityReport stability_check(const Eigen::SparseMatrix<double>& K, const StabilitySettings& settings,
                                const Eigen::VectorXd& load = Eigen::VectorXd(),
                                const Eigen::MatrixXd& gauge = Eigen::MatrixXd());

}  // namespace shellpath
