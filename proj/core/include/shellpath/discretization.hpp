#pragma once

#include <vector>

#include <Eigen/Core>

#include "shellpath/control_mesh.hpp"
#include "shellpath/frames.hpp"
#include "shellpath/material.hpp"
#include "shellpath/patch_basis.hpp"
#include "shellpath/patch_stencil.hpp"

namespace shellpath {

struct ShellSettings {
  double thickness = 0.0;
  MaterialParams material;
  int thickness_points = 2;
  int quadrature_points = 3;
};

struct QuadratureData {
  PatchBasis basis;
  /// Gauss weight in parameter space.
  double weight = 0.0;
  SurfaceDerivatives reference;
  ReferenceFrame frame;
};

struct Element {
  PatchStencil stencil;
  std::vector<QuadratureData> points;
  int num_dofs() const { return 3 * static_cast<int>(stencil.control.size()); }
};

/// A point on the limit surface given by face and face parameters.
struct SurfacePoint {
  int face = -1;
  double theta1 = 0.0, theta2 = 0.0;
};

/// Shell elements on the limit surface of a control mesh. Faces that cannot be evaluated
/// directly trigger one global refinement of the mesh.
class Discretization {
public:
  Discretization(const ControlMesh& mesh, ShellSettings settings);

  const ControlMesh& mesh() const { return mesh_; }
  const ShellSettings& settings() const { return settings_; }
  int presubdivisions() const { return presubdivisions_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  const Element& element(int e) const { return elements_[e]; }
  int num_dofs() const { return 3 * mesh_.num_vertices(); }
  double reference_area() const { return area_; }

  /// Displacements of the element's control points, one row each.
  Eigen::MatrixXd gather(int e, const Eigen::VectorXd& u) const;

  /// Position and derivatives of the deformed (u given) or reference (u empty) limit surface.
  SurfaceDerivatives evaluate(const SurfacePoint& p, const Eigen::VectorXd& u) const;

  /// Closest point on the reference limit surface.
  SurfacePoint closest_point(const Vec3& x) const;

private:
  ControlMesh mesh_;
  ShellSettings settings_;
  int presubdivisions_ = 0;
  std::vector<Element> elements_;
  double area_ = 0.0;
};

SurfaceDerivatives combine(const PatchBasis& basis, const std::vector<int>& control, const std::vector<Vec3>& points);

}  // namespace shellpath
