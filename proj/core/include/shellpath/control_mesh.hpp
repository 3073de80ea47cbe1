#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "shellpath/error.hpp"

namespace shellpath {

using Vec3 = Eigen::Vector3d;
using Quad = std::array<int, 4>;

/// Quad control mesh with half-edge adjacency.
///
/// Half-edge h = 4*f + k runs from faces[f][k] to faces[f][(k+1)%4]; faces are
/// counter-clockwise seen from the outward side. The constructor validates
/// topology and throws MeshError naming the offending entity.
class ControlMesh {
public:
  ControlMesh() = default;
  ControlMesh(std::vector<Vec3> vertices, std::vector<Quad> faces);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return static_cast<int>(edge_halfedge_.size()); }
  int num_halfedges() const { return 4 * num_faces(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(int v) const { return vertices_[v]; }
  const std::vector<Quad>& faces() const { return faces_; }
  const Quad& face(int f) const { return faces_[f]; }

  int valence(int v) const { return valence_[v]; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  bool is_closed() const { return boundary_edges_ == 0; }
  int num_boundary_edges() const { return boundary_edges_; }

  static int next(int h) { return (h & ~3) | ((h + 1) & 3); }
  static int prev(int h) { return (h & ~3) | ((h + 3) & 3); }
  static int face_of(int h) { return h >> 2; }
  int twin(int h) const { return twin_[h]; }
  int origin(int h) const { return faces_[h >> 2][h & 3]; }
  int dest(int h) const { return faces_[h >> 2][(h + 1) & 3]; }
  int edge_of(int h) const { return halfedge_edge_[h]; }
  /// A half-edge of the edge; the one without twin for boundary edges.
  int edge_halfedge(int e) const { return edge_halfedge_[e]; }
  /// An outgoing half-edge of v; for boundary vertices the one on the boundary.
  int outgoing(int v) const { return outgoing_[v]; }

  /// One-ring of an interior vertex: edge neighbours and face-diagonal vertices in
  /// counter-clockwise order starting at outgoing(v).
  void one_ring(int v, std::vector<int>& edge_nbrs, std::vector<int>& diag_nbrs) const;

  /// Same topology, new positions.
  ControlMesh with_vertices(std::vector<Vec3> vertices) const;

private:
  void build();

  std::vector<Vec3> vertices_;
  std::vector<Quad> faces_;
  std::vector<int> twin_;
  std::vector<int> halfedge_edge_;
  std::vector<int> edge_halfedge_;
  std::vector<int> outgoing_;
  std::vector<int> valence_;
  std::vector<char> boundary_vertex_;
  int boundary_edges_ = 0;
};

/// Reads the ASCII format: lines "v x y z" and "f i j k l" with 1-based indices;
/// '#' starts a comment. Errors carry the line number.
ControlMesh read_control_mesh(std::istream& in);
ControlMesh load_control_mesh(const std::string& path);
void write_control_mesh(std::ostream& out, const ControlMesh& mesh);

/// Limit position of a control vertex under Catmull-Clark subdivision.
Vec3 limit_position(const ControlMesh& mesh, int v);

}  // namespace shellpath
