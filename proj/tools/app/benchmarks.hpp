#pragma once

#include <string>
#include <vector>

#include "shellpath/continuation.hpp"
#include "shellpath/control_mesh.hpp"
#include "shellpath/discretization.hpp"
#include "shellpath/dof_map.hpp"

namespace shellpath::app {

/// Shear-modulus scale of the balloon and torus material constants.
inline constexpr double kBalloonMu = 4.225e5;

/// Everything needed to run one benchmark.
struct Benchmark {
  std::string name;
  ControlMesh mesh;
  std::vector<ConstraintRule> constraints;
  ShellSettings shell;
  double reference_pressure = 1.0;
  ContinuationSettings continuation;
  /// Stop once the enclosed volume reaches this multiple of the reference volume.
  double volume_ratio_target = 0.0;
  /// Volume of the full body from the modelled part: apex and multiplicity.
  Vec3 apex = Vec3::Zero();
  double volume_factor = 1.0;
  /// Measure eigenmodes without the rigid motion removed by gauge constraints.
  bool rigid_metric = false;
  /// Radius used to report stretch, 0 when not meaningful.
  double sphere_radius = 0.0;
};

struct BenchmarkOptions {
  int refine = 0;
  /// Material case for the balloon and torus; 0 selects the benchmark default.
  int case_id = 0;
  /// Target pressure; negative keeps the benchmark default.
  double pressure = -1.0;
};

const std::vector<std::string>& benchmark_names();

/// Throws ConfigError for unknown names or options.
Benchmark make_benchmark(const std::string& name, const BenchmarkOptions& opts = {});

/// Disk of radius 7.5: a 6x3 block surrounded by four rings, 90 faces, normals +z.
ControlMesh plate_mesh(double radius = 7.5);
/// One eighth of a cube-sphere with n x n faces per cube-face patch; boundaries on the
/// coordinate planes, vertex limit points on the sphere.
ControlMesh sphere_octant_mesh(int n, double radius);
/// Closed cube-sphere, 6 * (2n)^2 faces, vertex limit points on the sphere.
ControlMesh cube_sphere_mesh(int n, double radius);
/// 16 x 16 torus about the y axis whose limit surface spans +-10.6522 x +-1.80474 x +-10.6522.
ControlMesh torus_mesh(int n = 16);
/// Unit square [0,1]^2 in the plane z = 0 with n x n faces.
ControlMesh square_mesh(int n = 16);

/// Moves the control points until every vertex limit point lies on the sphere |x| = radius.
ControlMesh fit_vertex_limits_to_sphere(const ControlMesh& mesh, double radius);

/// Control point furthest along `direction`.
int extreme_vertex(const ControlMesh& mesh, const Vec3& direction);

}  // namespace shellpath::app
