#include "shellpath/dof_map.hpp"

#include <limits>
#include <sstream>

namespace shellpath {

std::string ConstraintRule::describe() const {
  std::ostringstream s;
  switch (selector) {
    case Selector::Boundary: s << "boundary"; break;
    case Selector::Plane: s << "plane x" << axis << "=" << offset; break;
    case Selector::Point: s << "point (" << point[0] << ", " << point[1] << ", " << point[2] << ")"; break;
    case Selector::All: s << "all"; break;
  }
  s << " fix";
  for (int i = 0; i < 3; ++i)
    if (components[i]) s << " u" << "xyz"[i];
  return s.str();
}

DofMap::DofMap(int num_dofs) : constrained_(num_dofs, 0), prescribed_(num_dofs, 0.0) { rebuild(); }

void DofMap::constrain(int dof, double value) {
  if (dof < 0 || dof >= num_dofs()) throw Error("constraint on nonexistent DOF " + std::to_string(dof));
  constrained_[dof] = 1;
  prescribed_[dof] = value;
  rebuild();
}

void DofMap::rebuild() {
  free_.clear();
  free_index_.assign(constrained_.size(), -1);
  for (int d = 0; d < num_dofs(); ++d)
    if (!constrained_[d]) {
      free_index_[d] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& u_free) const {
  if (u_free.size() != num_free()) throw Error("free vector has wrong size");
  Eigen::VectorXd u(num_dofs());
  for (int d = 0; d < num_dofs(); ++d) u[d] = constrained_[d] ? prescribed_[d] : u_free[free_index_[d]];
  return u;
}

Eigen::VectorXd DofMap::restrict_to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(num_free());
  for (int i = 0; i < num_free(); ++i) r[i] = full[free_[i]];
  return r;
}

DofMap build_dof_map(const ControlMesh& mesh, const std::vector<ConstraintRule>& rules) {
  DofMap map(3 * mesh.num_vertices());
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max()), hi = -lo;
  for (const Vec3& x : mesh.vertices()) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const double diag = (hi - lo).norm();
  for (const ConstraintRule& r : rules) {
    std::vector<int> picked;
    const double tol = r.tolerance * diag;
    if (r.selector == ConstraintRule::Selector::Point) {
      int best = -1;
      double bd = std::numeric_limits<double>::max();
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double d = (mesh.vertex(v) - r.point).norm();
        if (d < bd) {
          bd = d;
          best = v;
        }
      }
      if (bd > 1e-6 * diag) throw Error("constraint '" + r.describe() + "' matches no control point");
      picked.push_back(best);
    } else {
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        bool take = false;
        switch (r.selector) {
          case ConstraintRule::Selector::Boundary: take = mesh.is_boundary_vertex(v); break;
          case ConstraintRule::Selector::Plane: take = std::abs(mesh.vertex(v)[r.axis] - r.offset) <= tol; break;
          case ConstraintRule::Selector::All: take = true; break;
          default: break;
        }
        if (take) picked.push_back(v);
      }
      if (picked.empty()) throw Error("constraint '" + r.describe() + "' matches no control point");
    }
    for (int v : picked)
      for (int i = 0; i < 3; ++i)
        if (r.components[i]) map.constrain(3 * v + i, r.value);
  }
  return map;
}

}  // namespace shellpath
