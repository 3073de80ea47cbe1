#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shellpath/control_mesh.hpp"

namespace shellpath {

/// Selects control points and fixes some of their displacement components.
struct ConstraintRule {
  enum class Selector { Boundary, Plane, Point, All };
  Selector selector = Selector::Boundary;
  /// Plane: points with x[axis] == offset. Point: the control point nearest to `point`.
  int axis = 0;
  double offset = 0.0;
  Vec3 point = Vec3::Zero();
  std::array<bool, 3> components{true, true, true};
  double value = 0.0;
  /// Relative to the bounding-box diagonal.
  double tolerance = 1e-8;

  static ConstraintRule boundary(std::array<bool, 3> comps) { return {Selector::Boundary, 0, 0.0, Vec3::Zero(), comps}; }
  static ConstraintRule plane(int axis, double offset, std::array<bool, 3> comps) {
    return {Selector::Plane, axis, offset, Vec3::Zero(), comps};
  }
  static ConstraintRule at_point(const Vec3& p, std::array<bool, 3> comps) { return {Selector::Point, 0, 0.0, p, comps}; }
  std::string describe() const;
};

/// Free/constrained partition of the displacement DOFs; DOF 3*v + i is component i of control point v.
class DofMap {
public:
  DofMap() = default;
  explicit DofMap(int num_dofs);

  void constrain(int dof, double value = 0.0);
  bool is_constrained(int dof) const { return constrained_[dof]; }
  int num_dofs() const { return static_cast<int>(constrained_.size()); }
  int num_free() const { return static_cast<int>(free_.size()); }
  int num_constrained() const { return num_dofs() - num_free(); }
  const std::vector<int>& free_dofs() const { return free_; }
  /// Index among the free DOFs, -1 if constrained.
  int free_index(int dof) const { return free_index_[dof]; }

  Eigen::VectorXd expand(const Eigen::VectorXd& u_free) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;

private:
  void rebuild();
  std::vector<char> constrained_;
  std::vector<double> prescribed_;
  std::vector<int> free_;
  std::vector<int> free_index_;
};

DofMap build_dof_map(const ControlMesh& mesh, const std::vector<ConstraintRule>& rules);

}  // namespace shellpath
