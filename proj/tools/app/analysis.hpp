#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "shellpath/continuation.hpp"
#include "shellpath/control_mesh.hpp"
#include "shellpath/discretization.hpp"

namespace shellpath::app {

/// First located load maximum on the branch, null if none.
const LimitPoint* first_load_maximum(const PathHistory& h, int branch);

/// Kappa on a branch at the given volume by linear interpolation between consecutive records whose
/// volumes bracket it; empty outside the traced range.
std::optional<double> kappa_at_volume(const std::vector<const StepRecord*>& branch, double volume);

/// |u_b - R u_a| summed over control points a whose rotated position R x_a is control point b,
/// relative to |u|. Zero for fields invariant under the rotation.
double rotational_asymmetry(const ControlMesh& mesh, const Eigen::VectorXd& u, const Vec3& axis, double angle);

/// u_z at `samples` points on the reference segment from a to b.
std::vector<double> profile_uz(const Discretization& disc, const Eigen::VectorXd& u, const Vec3& a, const Vec3& b,
                               int samples);

/// Sign changes of the second difference of a sampled profile; values below rel_floor times the
/// largest magnitude are skipped.
int curvature_sign_changes(const std::vector<double>& profile, double rel_floor = 1e-3);

}  // namespace shellpath::app
