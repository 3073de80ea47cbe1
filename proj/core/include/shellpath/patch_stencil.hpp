#pragma once

#include <vector>

#include <Eigen/Core>

#include "shellpath/control_mesh.hpp"

namespace shellpath {

enum class PatchKind { Regular, Irregular };

/// Control points that influence one face.
///
/// Slots are the canonical patch points: 16 in row-major 4x4 order for a regular
/// patch, 2n+8 for a patch whose canonical corner 0 has valence n. In the
/// irregular layout slot 0 is the extraordinary vertex, slots 2j+1 and 2j+2 are
/// the edge and diagonal neighbours of the j-th face around it, and the last seven
/// are the grid points (3,0) (3,1) (3,2) (3,3) (2,3) (1,3) (0,3).
/// Boundary patches reference ghost points given as combinations of mesh points;
/// `expansion` maps the distinct `control` points to slots.
struct PatchStencil {
  int face = -1;
  PatchKind kind = PatchKind::Regular;
  int valence = 4;
  /// Face corner that plays canonical corner 0.
  int rotation = 0;
  bool boundary = false;
  std::vector<int> control;
  Eigen::MatrixXd expansion;

  int num_slots() const { return static_cast<int>(expansion.rows()); }
};

/// Throws SubdivisionRequired for faces with more than one extraordinary vertex or an
/// extraordinary vertex next to the boundary, MeshError for boundary vertices of valence
/// three or more.
PatchStencil patch_stencil(const ControlMesh& mesh, int face);

/// Irregular slot layout around corner `corner` of `face`, for an interior vertex of any
/// valence whose neighbouring corners are interior of valence 4.
PatchStencil ring_patch_stencil(const ControlMesh& mesh, int face, int corner);

/// Grid position (i, j) of slot s of the irregular layout when the valence is 4.
Eigen::Vector2i ring_slot_grid(int s);

/// True if some face needs one refinement before it can be evaluated.
bool needs_presubdivision(const ControlMesh& mesh);

}  // namespace shellpath
