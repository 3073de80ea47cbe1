#include "app/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "shellpath/subdivision.hpp"

namespace shellpath::app {

namespace {

const double kPi = std::acos(-1.0);

/// Cube-surface lattice in [-n, n]^3, faces kept when `keep` accepts their lattice corners.
template <class Keep>
ControlMesh cube_lattice(int n, Keep&& keep) {
  std::map<std::array<int, 3>, int> ids;
  std::vector<Vec3> pts;
  std::vector<Quad> faces;
  auto id = [&](const std::array<int, 3>& p) {
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    Vec3 x;
    for (int k = 0; k < 3; ++k) x[k] = std::tan(0.25 * kPi * p[k] / n);
    pts.push_back(x.normalized());
    ids[p] = static_cast<int>(pts.size()) - 1;
    return ids[p];
  };
  for (int a = 0; a < 3; ++a)
    for (int s : {1, -1}) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      for (int j = -n; j < n; ++j)
        for (int i = -n; i < n; ++i) {
          std::array<std::array<int, 3>, 4> q;
          const int di[4] = {0, 1, 1, 0}, dj[4] = {0, 0, 1, 1};
          for (int k = 0; k < 4; ++k) {
            q[k][a] = s * n;
            q[k][b] = i + di[k];
            q[k][c] = j + dj[k];
          }
          if (s < 0) std::swap(q[1], q[3]);
          if (!keep(q)) continue;
          faces.push_back({id(q[0]), id(q[1]), id(q[2]), id(q[3])});
        }
    }
  // renumber vertices in lattice order so the output does not depend on face traversal
  std::vector<int> order(pts.size()), remap(pts.size());
  int k = 0;
  for (const auto& [p, v] : ids) order[k++] = v;
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);
  std::vector<Vec3> sorted(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) sorted[remap[i]] = pts[i];
  for (Quad& f : faces)
    for (int& v : f) v = remap[v];
  return ControlMesh(std::move(sorted), std::move(faces));
}

ControlMesh scaled(const ControlMesh& m, double s) {
  std::vector<Vec3> v = m.vertices();
  for (Vec3& x : v) x *= s;
  return m.with_vertices(std::move(v));
}

MaterialParams balloon_material(int case_id) {
  if (case_id == 1) return MaterialParams::mooney_rivlin(0.5 * kBalloonMu, 0.0);
  if (case_id == 2) return MaterialParams::mooney_rivlin(0.4375 * kBalloonMu, 0.0625 * kBalloonMu);
  throw ConfigError("case must be 1 or 2, got " + std::to_string(case_id));
}

std::vector<ConstraintRule> gauge_constraints(const ControlMesh& m, int axis) {
  // three control points on the equator of a body symmetric about `axis`; fixes rigid motion only
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  const int A = extreme_vertex(m, Vec3::Unit(b)), B = extreme_vertex(m, Vec3::Unit(c)), C = extreme_vertex(m, -Vec3::Unit(b));
  auto comps = [](int i, int j) {
    std::array<bool, 3> r{false, false, false};
    r[i] = r[j] = true;
    return r;
  };
  return {ConstraintRule::at_point(m.vertex(A), comps(axis, c)), ConstraintRule::at_point(m.vertex(B), comps(axis, b)),
          ConstraintRule::at_point(m.vertex(C), comps(axis, c))};
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"plate", "sphere_octant", "torus", "airbag", "sphere"};
  return names;
}

int extreme_vertex(const ControlMesh& mesh, const Vec3& d) {
  int best = 0;
  for (int v = 1; v < mesh.num_vertices(); ++v)
    if (mesh.vertex(v).dot(d) > mesh.vertex(best).dot(d)) best = v;
  return best;
}

ControlMesh fit_vertex_limits_to_sphere(const ControlMesh& mesh, double radius) {
  ControlMesh m = mesh;
  for (int it = 0; it < 500; ++it) {
    std::vector<Vec3> p = m.vertices();
    double change = 0.0;
    for (int v = 0; v < m.num_vertices(); ++v) {
      const Vec3 l = limit_position(m, v);
      const Vec3 d = radius * l.normalized() - l;
      p[v] += d;
      change = std::max(change, d.norm());
    }
    m = m.with_vertices(std::move(p));
    if (change < 1e-13 * radius) break;
  }
  return m;
}

ControlMesh plate_mesh(double radius) {
  const double rim = radius * 6.0 / (4.0 + 2.0 * std::cos(kPi / 9.0));
  const double a = 0.4 * rim, b = a * std::tan(kPi / 6.0);
  std::vector<Vec3> v;
  for (int j = 0; j <= 3; ++j)
    for (int i = 0; i <= 6; ++i) v.emplace_back(-a + 2.0 * a * i / 6.0, -b + 2.0 * b * j / 3.0, 0.0);
  auto bid = [](int i, int j) { return i + 7 * j; };
  std::vector<Quad> f;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 6; ++i) f.push_back({bid(i, j), bid(i + 1, j), bid(i + 1, j + 1), bid(i, j + 1)});
  // perimeter counter-clockwise from the corner at 30 degrees
  std::vector<int> ring;
  for (int i = 6; i > 0; --i) ring.push_back(bid(i, 3));
  for (int j = 3; j > 0; --j) ring.push_back(bid(0, j));
  for (int i = 0; i < 6; ++i) ring.push_back(bid(i, 0));
  for (int j = 0; j < 3; ++j) ring.push_back(bid(6, j));
  const int m = static_cast<int>(ring.size());
  std::vector<Vec3> inner(m);
  for (int k = 0; k < m; ++k) inner[k] = v[ring[k]];
  for (int l = 1; l <= 4; ++l) {
    const double t = l / 4.0;
    std::vector<int> next(m);
    for (int k = 0; k < m; ++k) {
      const double th = kPi / 6.0 + 2.0 * kPi * k / m;
      v.push_back((1.0 - t) * inner[k] + t * Vec3(rim * std::cos(th), rim * std::sin(th), 0.0));
      next[k] = static_cast<int>(v.size()) - 1;
    }
    for (int k = 0; k < m; ++k) f.push_back({ring[k], next[k], next[(k + 1) % m], ring[(k + 1) % m]});
    ring = std::move(next);
  }
  return ControlMesh(std::move(v), std::move(f));
}

ControlMesh sphere_octant_mesh(int n, double radius) {
  if (n < 1) throw ConfigError("octant resolution must be positive");
  const ControlMesh unit = cube_lattice(n, [](const auto& q) {
    for (const auto& p : q)
      for (int c : p)
        if (c < 0) return false;
    return true;
  });
  return fit_vertex_limits_to_sphere(scaled(unit, radius), radius);
}

ControlMesh cube_sphere_mesh(int n, double radius) {
  if (n < 1) throw ConfigError("sphere resolution must be positive");
  const ControlMesh unit = cube_lattice(n, [](const auto&) { return true; });
  return fit_vertex_limits_to_sphere(scaled(unit, radius), radius);
}

ControlMesh torus_mesh(int n) {
  const double c = (4.0 + 2.0 * std::cos(2.0 * kPi / n)) / 6.0;
  const double r = 1.80474 / c, R = 10.6522 / c - 1.80474;
  std::vector<Vec3> v;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * i / n, p = 2.0 * kPi * j / n;
      const double rho = R + r * std::cos(p);
      v.emplace_back(rho * std::cos(t), r * std::sin(p), -rho * std::sin(t));
    }
  auto id = [n](int i, int j) { return (i % n) + n * (j % n); };
  std::vector<Quad> f;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return ControlMesh(std::move(v), std::move(f));
}

ControlMesh square_mesh(int n) {
  std::vector<Vec3> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0);
  std::vector<Quad> f;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f.push_back({i + (n + 1) * j, i + 1 + (n + 1) * j, i + 1 + (n + 1) * (j + 1), i + (n + 1) * (j + 1)});
  return ControlMesh(std::move(v), std::move(f));
}

Benchmark make_benchmark(const std::string& name, const BenchmarkOptions& opts) {
  if (opts.refine < 0 || opts.refine > 4) throw ConfigError("refine must be in [0, 4]");
  Benchmark b;
  b.name = name;
  ContinuationSettings& cs = b.continuation;
  auto subdivided = [&](const ControlMesh& m) { return opts.refine ? catmull_clark_subdivide(m, opts.refine) : m; };
  if (name == "plate") {
    b.mesh = subdivided(plate_mesh(7.5));
    b.constraints = {ConstraintRule::boundary({true, true, true})};
    b.shell.thickness = 0.5;
    b.shell.material = MaterialParams::mooney_rivlin(80.0, 20.0);
    b.reference_pressure = 1.0;
    cs.kappa_target = opts.pressure >= 0.0 ? opts.pressure : 35.0;
    cs.dkappa0 = 0.1;
  } else if (name == "sphere_octant" || name == "sphere") {
    const double R = 10.0;
    const bool octant = name == "sphere_octant";
    const int n = (octant ? 8 : 4) << opts.refine;
    b.mesh = octant ? sphere_octant_mesh(n, R) : cube_sphere_mesh(n, R);
    b.constraints = octant ? std::vector<ConstraintRule>{ConstraintRule::plane(0, 0.0, {true, false, false}),
                                                         ConstraintRule::plane(1, 0.0, {false, true, false}),
                                                         ConstraintRule::plane(2, 0.0, {false, false, true})}
                           : gauge_constraints(b.mesh, 2);
    b.rigid_metric = !octant;
    b.shell.thickness = 0.1;
    b.shell.material = balloon_material(opts.case_id ? opts.case_id : 1);
    b.reference_pressure = kBalloonMu * b.shell.thickness / R;
    b.volume_factor = octant ? 8.0 : 1.0;
    b.sphere_radius = R;
    cs.kappa_target = opts.pressure >= 0.0 ? opts.pressure / b.reference_pressure : 1e3;
    b.volume_ratio_target = opts.case_id != 2 ? std::pow(2.05, 3) : std::pow(4.2, 3);
    cs.dkappa0 = 0.2;
    cs.max_steps = 400;
  } else if (name == "torus") {
    b.mesh = subdivided(torus_mesh(16));
    b.constraints = gauge_constraints(b.mesh, 1);
    b.rigid_metric = true;
    b.shell.thickness = 0.01;
    b.shell.material = balloon_material(opts.case_id ? opts.case_id : 2);
    b.reference_pressure = kBalloonMu * b.shell.thickness / 1.80474;
    cs.kappa_target = opts.pressure >= 0.0 ? opts.pressure / b.reference_pressure : 1e3;
    b.volume_ratio_target = 6.0;
    cs.dkappa0 = 0.05;
    cs.max_steps = 300;
    cs.branching = true;
    cs.solver.tol_rel = 1e-6;
  } else if (name == "airbag") {
    b.mesh = subdivided(square_mesh(16));
    b.constraints = {ConstraintRule::boundary({false, false, true}),
                     ConstraintRule::at_point(Vec3(0.5, 0.5, 0.0), {true, true, false}),
                     ConstraintRule::at_point(Vec3(1.0, 0.5, 0.0), {false, true, false})};
    b.shell.thickness = 0.001;
    b.shell.material = MaterialParams::st_venant_kirchhoff(5e8, 0.4);
    b.reference_pressure = 1.0;
    cs.kappa_target = opts.pressure >= 0.0 ? opts.pressure : 5000.0;
    cs.dkappa0 = 200.0;
    cs.max_steps = 400;
    cs.solver.psi = 10.0;
    cs.solver.tol_rel = 1e-6;
    cs.solver.max_iter = 40;
  } else {
    std::string known;
    for (const std::string& s : benchmark_names()) known += (known.empty() ? "" : ", ") + s;
    throw ConfigError("unknown benchmark '" + name + "' (known: " + known + ")");
  }
  cs.thickness = b.shell.thickness;
  cs.reference_load = b.reference_pressure;
  return b;
}

}  // namespace shellpath::app
