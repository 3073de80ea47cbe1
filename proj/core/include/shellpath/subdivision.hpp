#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "shellpath/control_mesh.hpp"

namespace shellpath {

/// One Catmull-Clark refinement as a linear map from old to new control points.
///
/// New points are ordered vertex points [0, V), edge points [V, V+E) by edge id,
/// face points [V+E, V+E+F). Child 4*f+k of face f sits at its corner k and is
/// (vertex point, edge point of half-edge k, face point, edge point of half-edge k-1).
/// Boundary edges use midpoints, boundary vertices (1, 6, 1)/8, valence-1 corners are kept.
struct SubdivisionStep {
  std::vector<Quad> faces;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
};

SubdivisionStep subdivision_step(const ControlMesh& mesh);

ControlMesh catmull_clark_subdivide(const ControlMesh& mesh, int levels = 1);

/// Parameters of child face 4*f+k's point (u, v) inside the parent face.
Eigen::Vector2d child_to_parent(int k, double u, double v);

}  // namespace shellpath
