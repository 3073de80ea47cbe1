#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <tuple>

#include "shellpath/control_mesh.hpp"

namespace fixtures {

using shellpath::ControlMesh;
using shellpath::Quad;
using shellpath::Vec3;

/// nx-by-ny quad grid; periodic directions wrap. pos(i, j) gives the vertex position.
inline ControlMesh grid(int nx, int ny, bool wrap_x, bool wrap_y, const std::function<Vec3(int, int)>& pos) {
  const int vx = wrap_x ? nx : nx + 1, vy = wrap_y ? ny : ny + 1;
  std::vector<Vec3> v;
  for (int j = 0; j < vy; ++j)
    for (int i = 0; i < vx; ++i) v.push_back(pos(i, j));
  auto id = [&](int i, int j) { return (i % vx) + vx * (j % vy); };
  std::vector<Quad> f;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return ControlMesh(std::move(v), std::move(f));
}

inline ControlMesh flat_grid(int nx, int ny, double h = 1.0) {
  return grid(nx, ny, false, false, [&](int i, int j) { return Vec3(h * i, h * j, 0.0); });
}

inline ControlMesh torus(int n, int m, double R = 3.0, double r = 1.0) {
  const double pi = std::acos(-1.0);
  return grid(n, m, true, true, [&](int i, int j) {
    const double t = 2 * pi * i / n, p = 2 * pi * j / m;
    return Vec3((R + r * std::cos(p)) * std::cos(t), (R + r * std::cos(p)) * std::sin(t), r * std::sin(p));
  });
}

inline ControlMesh cube() {
  std::vector<Vec3> v = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                         {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  std::vector<Quad> f = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  return ControlMesh(std::move(v), std::move(f));
}

/// n sectors of k-by-k quads around a centre vertex of valence n, gently curved.
inline ControlMesh star(int n, int k, double bump = 0.1) {
  const double pi = std::acos(-1.0);
  std::map<std::tuple<int, int, int>, int> ids;
  std::vector<Vec3> v;
  auto key = [&](int s, int i, int j) {
    s = ((s % n) + n) % n;
    if (i == 0 && j == 0) return std::make_tuple(0, 0, 0);
    if (j == 0) return std::make_tuple(((s - 1) % n + n) % n, 0, i);
    return std::make_tuple(s, i, j);
  };
  auto id = [&](int s, int i, int j) {
    auto kk = key(s, i, j);
    auto it = ids.find(kk);
    if (it != ids.end()) return it->second;
    const auto [ss, ii, jj] = kk;
    const double a0 = 2 * pi * ss / n, a1 = 2 * pi * (ss + 1) / n;
    const double x = ii * std::cos(a0) + jj * std::cos(a1), y = ii * std::sin(a0) + jj * std::sin(a1);
    v.emplace_back(x, y, bump * (std::sin(0.7 * x) + std::cos(0.5 * y) + 0.1 * x * y));
    ids[kk] = static_cast<int>(v.size()) - 1;
    return ids[kk];
  };
  std::vector<Quad> f;
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) f.push_back({id(s, i, j), id(s, i + 1, j), id(s, i + 1, j + 1), id(s, i, j + 1)});
  return ControlMesh(std::move(v), std::move(f));
}

inline ControlMesh jitter(const ControlMesh& m, double amp, unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  std::vector<Vec3> v = m.vertices();
  for (Vec3& x : v) x += Vec3(d(rng), d(rng), d(rng));
  return m.with_vertices(std::move(v));
}

/// Straight transcription of the textbook Catmull-Clark rules, position based,
/// with the child numbering 4*f+k used by the library.
inline ControlMesh reference_subdivide(const ControlMesh& m) {
  const int nv = m.num_vertices(), ne = m.num_edges(), nf = m.num_faces();
  std::vector<Vec3> out(nv + ne + nf, Vec3::Zero());
  std::vector<Vec3> fp(nf, Vec3::Zero());
  for (int f = 0; f < nf; ++f) {
    for (int v : m.face(f)) fp[f] += 0.25 * m.vertex(v);
    out[nv + ne + f] = fp[f];
  }
  for (int e = 0; e < ne; ++e) {
    const int h = m.edge_halfedge(e);
    const Vec3 mid = 0.5 * (m.vertex(m.origin(h)) + m.vertex(m.dest(h)));
    out[nv + e] = m.twin(h) < 0 ? mid : 0.5 * mid + 0.25 * (fp[h >> 2] + fp[m.twin(h) >> 2]);
  }
  std::vector<Vec3> Q(nv, Vec3::Zero()), R(nv, Vec3::Zero()), B(nv, Vec3::Zero());
  for (int h = 0; h < 4 * nf; ++h) {
    const int v = m.origin(h), w = m.dest(h);
    Q[v] += fp[h >> 2] / m.valence(v);
    if (m.twin(h) < 0) {
      B[v] += m.vertex(w);
      B[w] += m.vertex(v);
    }
  }
  for (int h = 0; h < 4 * nf; ++h) {
    const int v = m.origin(h);
    if (m.twin(h) >= 0) R[v] += 0.5 * (m.vertex(v) + m.vertex(m.dest(h))) / m.valence(v);
  }
  for (int v = 0; v < nv; ++v) {
    const double n = m.valence(v);
    if (!m.is_boundary_vertex(v))
      out[v] = (Q[v] + 2.0 * R[v] + (n - 3.0) * m.vertex(v)) / n;
    else if (m.valence(v) == 1)
      out[v] = m.vertex(v);
    else
      out[v] = 0.75 * m.vertex(v) + 0.125 * B[v];
  }
  std::vector<Quad> faces;
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 4; ++k) {
      const int h = 4 * f + k, hp = 4 * f + ((k + 3) & 3);
      faces.push_back({m.origin(h), nv + m.edge_of(h), nv + ne + f, nv + m.edge_of(hp)});
    }
  return ControlMesh(std::move(out), std::move(faces));
}

}  // namespace fixtures
