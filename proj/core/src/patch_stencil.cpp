#include "shellpath/patch_stencil.hpp"

#include <map>
#include <utility>

namespace shellpath {

namespace {

using Combo = std::vector<std::pair<int, double>>;

constexpr int kCornerGrid[4][2] = {{1, 1}, {2, 1}, {2, 2}, {1, 2}};
constexpr int kDirI[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
constexpr int kDirJ[4][2] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
constexpr int kOuterGrid[7][2] = {{3, 0}, {3, 1}, {3, 2}, {3, 3}, {2, 3}, {1, 3}, {0, 3}};

Combo point(int v) { return {{v, 1.0}}; }

Combo lin(std::initializer_list<std::pair<double, const Combo*>> terms) {
  Combo out;
  for (const auto& [w, c] : terms)
    for (const auto& [v, cw] : *c) out.emplace_back(v, w * cw);
  return out;
}

/// The three points completing the 2x2 block behind canonical corner k:
/// p1 at -J, p2 at -I-J, p3 at -I from the corner.
struct CornerBlock {
  Combo p1, p2, p3;
};

CornerBlock corner_block(const ControlMesh& mesh, int face, int rotation, int k) {
  auto cvert = [&](int j) { return mesh.face(face)[(j + rotation) & 3]; };
  const int h = 4 * face + ((k + rotation) & 3);
  const int hp = ControlMesh::prev(h);
  const int c = mesh.origin(h);
  const Combo pc = point(c), pn = point(cvert(k + 1)), pp = point(cvert(k + 3)), po = point(cvert(k + 2));
  CornerBlock blk;
  if (!mesh.is_boundary_vertex(c)) {
    const int a = ControlMesh::next(mesh.twin(h));
    const int b = ControlMesh::next(mesh.twin(a));
    blk.p1 = point(mesh.dest(a));
    blk.p3 = point(mesh.dest(b));
    blk.p2 = point(mesh.dest(ControlMesh::next(b)));
    return blk;
  }
  if (mesh.valence(c) == 1) {
    blk.p1 = lin({{2.0, &pc}, {-1.0, &pp}});
    blk.p3 = lin({{2.0, &pc}, {-1.0, &pn}});
    blk.p2 = lin({{4.0, &pc}, {-2.0, &pn}, {-2.0, &pp}, {1.0, &po}});
    return blk;
  }
  if (mesh.valence(c) != 2)
    throw MeshError("face " + std::to_string(face) + ": boundary vertex " + std::to_string(c) + " has valence " +
                    std::to_string(mesh.valence(c)) + "; boundary patches support valence 1 and 2 only");
  if (mesh.twin(h) < 0) {
    const int t = mesh.twin(hp);
    const Combo q = point(mesh.dest(ControlMesh::next(t)));
    blk.p3 = point(mesh.dest(ControlMesh::next(ControlMesh::next(t))));
    blk.p1 = lin({{2.0, &pc}, {-1.0, &pp}});
    blk.p2 = lin({{2.0, &blk.p3}, {-1.0, &q}});
  } else {
    const int t = mesh.twin(h);
    const Combo r = point(mesh.dest(ControlMesh::next(ControlMesh::next(t))));
    blk.p1 = point(mesh.dest(ControlMesh::next(t)));
    blk.p3 = lin({{2.0, &pc}, {-1.0, &pn}});
    blk.p2 = lin({{2.0, &blk.p1}, {-1.0, &r}});
  }
  return blk;
}

bool is_extraordinary(const ControlMesh& mesh, int v) {
  return !mesh.is_boundary_vertex(v) && mesh.valence(v) != 4;
}

void finish(PatchStencil& st, const std::vector<Combo>& slots) {
  std::map<int, int> col;
  for (const Combo& c : slots)
    for (const auto& [v, w] : c)
      if (col.emplace(v, static_cast<int>(st.control.size())).second) st.control.push_back(v);
  st.expansion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slots.size()), static_cast<Eigen::Index>(st.control.size()));
  for (std::size_t s = 0; s < slots.size(); ++s)
    for (const auto& [v, w] : slots[s]) st.expansion(static_cast<Eigen::Index>(s), col[v]) += w;
}

}  // namespace

Eigen::Vector2i ring_slot_grid(int s) {
  static constexpr int ring[9][2] = {{1, 1}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}, {0, 0}, {1, 0}, {2, 0}};
  if (s < 9) return {ring[s][0], ring[s][1]};
  return {kOuterGrid[s - 9][0], kOuterGrid[s - 9][1]};
}

PatchStencil patch_stencil(const ControlMesh& mesh, int face) {
  const Quad& q = mesh.face(face);
  int n_ev = 0, ev_corner = -1;
  bool touches_boundary = false;
  for (int k = 0; k < 4; ++k) {
    if (is_extraordinary(mesh, q[k])) {
      ++n_ev;
      ev_corner = k;
    }
    if (mesh.is_boundary_vertex(q[k])) {
      touches_boundary = true;
      if (mesh.valence(q[k]) > 2)
        throw MeshError("face " + std::to_string(face) + ": boundary vertex " + std::to_string(q[k]) +
                        " has valence " + std::to_string(mesh.valence(q[k])) +
                        "; boundary patches support valence 1 and 2 only");
    }
  }
  if (n_ev > 1) throw SubdivisionRequired(face, "more than one extraordinary vertex");
  if (n_ev == 1 && touches_boundary) throw SubdivisionRequired(face, "extraordinary vertex next to the boundary");

  PatchStencil st;
  st.face = face;
  st.boundary = touches_boundary;

  if (n_ev == 0) {
    std::vector<Combo> slots(16);
    for (int k = 0; k < 4; ++k) {
      const int gi = kCornerGrid[k][0], gj = kCornerGrid[k][1];
      const int *I = kDirI[k], *J = kDirJ[k];
      CornerBlock blk = corner_block(mesh, face, 0, k);
      slots[gi + 4 * gj] = point(q[k]);
      slots[(gi - J[0]) + 4 * (gj - J[1])] = std::move(blk.p1);
      slots[(gi - I[0] - J[0]) + 4 * (gj - I[1] - J[1])] = std::move(blk.p2);
      slots[(gi - I[0]) + 4 * (gj - I[1])] = std::move(blk.p3);
    }
    finish(st, slots);
    return st;
  }

  return ring_patch_stencil(mesh, face, ev_corner);
}

PatchStencil ring_patch_stencil(const ControlMesh& mesh, int face, int ev_corner) {
  const Quad& q = mesh.face(face);
  PatchStencil st;
  st.face = face;
  const int n = mesh.valence(q[ev_corner]);
  st.kind = PatchKind::Irregular;
  st.valence = n;
  st.rotation = ev_corner;
  std::vector<Combo> slots(2 * n + 8);
  slots[0] = point(q[ev_corner]);
  int h = 4 * face + ev_corner;
  for (int j = 0; j < n; ++j) {
    slots[2 * j + 1] = point(mesh.dest(h));
    slots[2 * j + 2] = point(mesh.dest(ControlMesh::next(h)));
    h = mesh.twin(ControlMesh::prev(h));
  }
  if (h != 4 * face + ev_corner) throw MeshError("face " + std::to_string(face) + ": broken fan around extraordinary vertex");
  auto outer_slot = [&](int gi, int gj) {
    for (int o = 0; o < 7; ++o)
      if (kOuterGrid[o][0] == gi && kOuterGrid[o][1] == gj) return 2 * n + 1 + o;
    return -1;
  };
  for (int k = 1; k < 4; ++k) {
    const int gi = kCornerGrid[k][0], gj = kCornerGrid[k][1];
    const int *I = kDirI[k], *J = kDirJ[k];
    CornerBlock blk = corner_block(mesh, face, ev_corner, k);
    const std::pair<int, int> pos[3] = {
        {gi - J[0], gj - J[1]}, {gi - I[0] - J[0], gj - I[1] - J[1]}, {gi - I[0], gj - I[1]}};
    Combo* pts[3] = {&blk.p1, &blk.p2, &blk.p3};
    for (int p = 0; p < 3; ++p) {
      const int s = outer_slot(pos[p].first, pos[p].second);
      if (s >= 0) slots[s] = std::move(*pts[p]);
    }
  }
  finish(st, slots);
  return st;
}

bool needs_presubdivision(const ControlMesh& mesh) {
  for (int f = 0; f < mesh.num_faces(); ++f) {
    try {
      patch_stencil(mesh, f);
    } catch (const SubdivisionRequired&) {
      return true;
    }
  }
  return false;
}

}  // namespace shellpath
