#include "shellpath/subdivision.hpp"

#include <map>

namespace shellpath {

namespace {

constexpr double kCorner[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

}  // namespace

Eigen::Vector2d child_to_parent(int k, double u, double v) {
  const int kn = (k + 1) & 3, kp = (k + 3) & 3;
  Eigen::Vector2d c(kCorner[k][0], kCorner[k][1]);
  Eigen::Vector2d du(kCorner[kn][0] - c[0], kCorner[kn][1] - c[1]);
  Eigen::Vector2d dv(kCorner[kp][0] - c[0], kCorner[kp][1] - c[1]);
  return c + 0.5 * u * du + 0.5 * v * dv;
}

SubdivisionStep subdivision_step(const ControlMesh& mesh) {
  const int nv = mesh.num_vertices(), ne = mesh.num_edges(), nf = mesh.num_faces();
  const int edge0 = nv, face0 = nv + ne;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(16 * nf + 8 * ne + 16 * nv);

  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 4; ++k) trip.emplace_back(face0 + f, mesh.face(f)[k], 0.25);

  for (int e = 0; e < ne; ++e) {
    const int h = mesh.edge_halfedge(e);
    const int a = mesh.origin(h), b = mesh.dest(h);
    if (mesh.twin(h) < 0) {
      trip.emplace_back(edge0 + e, a, 0.5);
      trip.emplace_back(edge0 + e, b, 0.5);
      continue;
    }
    trip.emplace_back(edge0 + e, a, 0.25);
    trip.emplace_back(edge0 + e, b, 0.25);
    for (int side : {h, mesh.twin(h)})
      for (int k = 0; k < 4; ++k) trip.emplace_back(edge0 + e, mesh.face(side >> 2)[k], 0.0625);
  }

  std::vector<int> ring_e, ring_d;
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary_vertex(v)) {
      if (mesh.valence(v) == 1) {
        trip.emplace_back(v, v, 1.0);
        continue;
      }
      int h = mesh.outgoing(v);
      const int right = mesh.dest(h);
      while (mesh.twin(ControlMesh::prev(h)) >= 0) h = mesh.twin(ControlMesh::prev(h));
      const int left = mesh.origin(ControlMesh::prev(h));
      trip.emplace_back(v, v, 0.75);
      trip.emplace_back(v, left, 0.125);
      trip.emplace_back(v, right, 0.125);
      continue;
    }
    // (Q + 2R + (n-3)P)/n with Q the mean face point and R the mean edge midpoint.
    mesh.one_ring(v, ring_e, ring_d);
    const double n = static_cast<double>(ring_e.size());
    const double wq = 1.0 / (n * n);
    trip.emplace_back(v, v, (n - 3.0) / n + 2.0 / n * 0.5 + wq * 0.25 * n);
    for (std::size_t j = 0; j < ring_e.size(); ++j) {
      trip.emplace_back(v, ring_e[j], 2.0 / n * 0.5 / n + wq * 0.25 * 2.0);
      trip.emplace_back(v, ring_d[j], wq * 0.25);
    }
  }

  SubdivisionStep step;
  step.matrix.resize(nv + ne + nf, nv);
  step.matrix.setFromTriplets(trip.begin(), trip.end());
  step.faces.resize(4 * nf);
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 4; ++k) {
      const int h = 4 * f + k;
      step.faces[h] = {mesh.origin(h), edge0 + mesh.edge_of(h), face0 + f, edge0 + mesh.edge_of(ControlMesh::prev(h))};
    }
  return step;
}

ControlMesh catmull_clark_subdivide(const ControlMesh& mesh, int levels) {
  ControlMesh m = mesh;
  for (int l = 0; l < levels; ++l) {
    SubdivisionStep step = subdivision_step(m);
    std::vector<Vec3> pts(step.matrix.rows(), Vec3::Zero());
    for (int r = 0; r < step.matrix.outerSize(); ++r)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(step.matrix, r); it; ++it)
        pts[r] += it.value() * m.vertex(it.col());
    m = ControlMesh(std::move(pts), std::move(step.faces));
  }
  return m;
}

}  // namespace shellpath
