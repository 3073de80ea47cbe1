#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "shellpath/assembler.hpp"
#include "shellpath/volume.hpp"

using namespace shellpath;

namespace {

ShellSettings settings(MaterialParams mat, double h = 0.1, int q = 3) {
  ShellSettings s;
  s.thickness = h;
  s.material = mat;
  s.quadrature_points = q;
  return s;
}

Eigen::VectorXd random_vector(int n, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

std::vector<int> sample_dofs(int n, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(static_cast<int>(rng() % n));
  return out;
}

/// Max relative deviation between K columns and central differences of the residual.
double tangent_fd_error(const Assembler& as, const Eigen::VectorXd& u, double p, const std::vector<int>& cols) {
  AssembledSystem s0, sp, sm;
  as.assemble(u, p, s0, true);
  const Eigen::MatrixXd K(s0.tangent);
  double err = 0.0;
  const double scale = K.cwiseAbs().maxCoeff();
  for (int c : cols) {
    const double eps = 1e-6;
    Eigen::VectorXd up = u, um = u;
    up[c] += eps;
    um[c] -= eps;
    as.assemble(up, p, sp, false);
    as.assemble(um, p, sm, false);
    const Eigen::VectorXd rp = sp.internal_force - p * sp.pressure_force;
    const Eigen::VectorXd rm = sm.internal_force - p * sm.pressure_force;
    const Eigen::VectorXd fd = (rp - rm) / (2 * eps);
    err = std::max(err, (fd - K.col(c)).cwiseAbs().maxCoeff() / scale);
  }
  return err;
}

}  // namespace

TEST_CASE("residual vanishes in the reference configuration") {
  for (const ControlMesh& m : {fixtures::torus(10, 6), fixtures::star(5, 3, 0.2), fixtures::cube()}) {
    const Discretization disc(m, settings(MaterialParams::mooney_rivlin(1.0, 0.3)));
    AssembledSystem s;
    Assembler(disc).assemble(Eigen::VectorXd::Zero(disc.num_dofs()), 0.0, s, false);
    CHECK(s.internal_force.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(s.energy) < 1e-14);
  }
}

TEST_CASE("internal force is the gradient of the strain energy") {
  const Discretization disc(fixtures::jitter(fixtures::torus(8, 6), 0.05), settings(MaterialParams::mooney_rivlin(1.0, 0.4)));
  const Assembler as(disc);
  const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.05, 3);
  AssembledSystem s, sp, sm;
  as.assemble(u, 0.0, s, false);
  for (int c : sample_dofs(disc.num_dofs(), 20, 5)) {
    const double eps = 1e-6;
    Eigen::VectorXd up = u, um = u;
    up[c] += eps;
    um[c] -= eps;
    as.assemble(up, 0.0, sp, false);
    as.assemble(um, 0.0, sm, false);
    CHECK((sp.energy - sm.energy) / (2 * eps) == doctest::Approx(s.internal_force[c]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("global tangent matches finite differences, follower pressure included") {
  SUBCASE("Mooney-Rivlin torus") {
    const Discretization disc(fixtures::jitter(fixtures::torus(8, 6), 0.05), settings(MaterialParams::mooney_rivlin(1.0, 0.4)));
    const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.05, 11);
    CHECK(tangent_fd_error(Assembler(disc), u, 0.3, sample_dofs(disc.num_dofs(), 25, 1)) < 1e-6);
  }
  SUBCASE("St. Venant-Kirchhoff cube with extraordinary vertices") {
    const Discretization disc(fixtures::cube(), settings(MaterialParams::st_venant_kirchhoff(100.0, 0.3), 0.05));
    const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.03, 12);
    CHECK(tangent_fd_error(Assembler(disc), u, 2.0, sample_dofs(disc.num_dofs(), 25, 2)) < 1e-6);
  }
  SUBCASE("neo-Hookean open patch around a valence-5 vertex") {
    const Discretization disc(fixtures::star(5, 3, 0.3), settings(MaterialParams::neo_hookean(1.0)));
    const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.05, 13);
    CHECK(tangent_fd_error(Assembler(disc), u, 0.5, sample_dofs(disc.num_dofs(), 25, 3)) < 1e-6);
  }
}

TEST_CASE("tangent is symmetric without pressure") {
  const Discretization disc(fixtures::cube(), settings(MaterialParams::mooney_rivlin(1.0, 0.2)));
  AssembledSystem s;
  Assembler(disc).assemble(random_vector(disc.num_dofs(), 0.05, 4), 0.0, s, true);
  const Eigen::MatrixXd K(s.tangent);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-10 * K.cwiseAbs().maxCoeff());
}

TEST_CASE("pressure load is the volume gradient on a closed surface") {
  // regular patches: x . a3~ is polynomial of degree 8 per direction, exact with 5 Gauss points
  const Discretization disc(fixtures::jitter(fixtures::torus(8, 6), 0.05), settings(MaterialParams::neo_hookean(1.0), 0.1, 5));
  const Assembler as(disc);
  const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.05, 21);
  AssembledSystem s;
  as.assemble(u, 0.0, s, false);
  for (int c : sample_dofs(disc.num_dofs(), 30, 9)) {
    const double eps = 1e-6;
    Eigen::VectorXd up = u, um = u;
    up[c] += eps;
    um[c] -= eps;
    const double fd = (enclosed_volume(disc, up) - enclosed_volume(disc, um)) / (2 * eps);
    CHECK(fd == doctest::Approx(s.pressure_force[c]).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("enclosed volume") {
  SUBCASE("independent of the apex for a closed surface") {
    const Discretization disc(fixtures::cube(), settings(MaterialParams::neo_hookean(1.0)));
    const Eigen::VectorXd none;
    const double v0 = enclosed_volume(disc, none);
    CHECK(v0 > 0.0);
    CHECK(enclosed_volume(disc, none, Vec3(0.3, -0.2, 0.7)) == doctest::Approx(v0).epsilon(1e-12));
  }
  SUBCASE("scales with the cube of a uniform stretch") {
    const Discretization disc(fixtures::torus(10, 6), settings(MaterialParams::neo_hookean(1.0)));
    Eigen::VectorXd u(disc.num_dofs());
    for (int v = 0; v < disc.mesh().num_vertices(); ++v) u.segment<3>(3 * v) = 0.5 * disc.mesh().vertex(v);
    CHECK(enclosed_volume(disc, u) == doctest::Approx(3.375 * enclosed_volume(disc, {})).epsilon(1e-12));
  }
  SUBCASE("cone over a flat sheet") {
    ControlMesh m = fixtures::flat_grid(4, 3, 0.5);
    std::vector<Vec3> v = m.vertices();
    for (Vec3& x : v) x.z() = 2.0;
    const Discretization disc(m.with_vertices(v), settings(MaterialParams::neo_hookean(1.0)));
    CHECK(enclosed_volume(disc, {}) == doctest::Approx(2.0 * disc.reference_area() / 3.0).epsilon(1e-12));
    CHECK(surface_area(disc, {}) == doctest::Approx(disc.reference_area()).epsilon(1e-14));
  }
}

TEST_CASE("rigid motions lie in the null space of the reference tangent") {
  const Discretization disc(fixtures::star(6, 2, 0.3), settings(MaterialParams::mooney_rivlin(1.0, 0.3)));
  AssembledSystem s;
  Assembler(disc).assemble(Eigen::VectorXd::Zero(disc.num_dofs()), 0.0, s, true);
  const double scale = Eigen::MatrixXd(s.tangent).cwiseAbs().maxCoeff();
  for (int mode = 0; mode < 6; ++mode) {
    Eigen::VectorXd r(disc.num_dofs());
    for (int v = 0; v < disc.mesh().num_vertices(); ++v) {
      const Vec3& x = disc.mesh().vertex(v);
      r.segment<3>(3 * v) = mode < 3 ? Vec3(Vec3::Unit(mode)) : Vec3(Vec3::Unit(mode - 3).cross(x));
    }
    CHECK((s.tangent * r).cwiseAbs().maxCoeff() < 1e-10 * scale * r.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("assembly is deterministic") {
  const Discretization disc(fixtures::cube(), settings(MaterialParams::mooney_rivlin(1.0, 0.3)));
  const Assembler as(disc);
  const Eigen::VectorXd u = random_vector(disc.num_dofs(), 0.05, 8);
  AssembledSystem a, b;
  as.assemble(u, 0.7, a, true);
  as.assemble(u, 0.7, b, true);
  CHECK(a.internal_force == b.internal_force);
  CHECK(a.pressure_force == b.pressure_force);
  CHECK(Eigen::MatrixXd(a.tangent) == Eigen::MatrixXd(b.tangent));
}

TEST_CASE("meshes with adjacent extraordinary vertices are refined once") {
  const Discretization cube(fixtures::cube(), settings(MaterialParams::neo_hookean(1.0)));
  CHECK(cube.presubdivisions() == 1);
  CHECK(cube.num_elements() == 24);
  const Discretization tor(fixtures::torus(6, 4), settings(MaterialParams::neo_hookean(1.0)));
  CHECK(tor.presubdivisions() == 0);
  CHECK(tor.num_elements() == 24);
}

TEST_CASE("constraint rules") {
  const ControlMesh m = fixtures::flat_grid(4, 3);
  SUBCASE("boundary clamps every rim point") {
    const DofMap d = build_dof_map(m, {ConstraintRule::boundary({true, true, true})});
    CHECK(d.num_constrained() == 3 * 14);
  }
  SUBCASE("plane selects by coordinate and components") {
    const DofMap d = build_dof_map(m, {ConstraintRule::plane(0, 0.0, {true, false, false})});
    CHECK(d.num_constrained() == 4);
    CHECK(d.is_constrained(0));
    CHECK_FALSE(d.is_constrained(1));
  }
  SUBCASE("point picks the nearest control point") {
    const DofMap d = build_dof_map(m, {ConstraintRule::at_point(Vec3(2, 1, 0), {false, false, true})});
    CHECK(d.num_constrained() == 1);
    CHECK(d.is_constrained(3 * (2 + 5 * 1) + 2));
  }
  SUBCASE("rules that match nothing are rejected") {
    CHECK_THROWS_AS(build_dof_map(m, {ConstraintRule::plane(2, 5.0, {true, true, true})}), Error);
    CHECK_THROWS_AS(build_dof_map(m, {ConstraintRule::at_point(Vec3(9, 9, 9), {true, true, true})}), Error);
  }
  SUBCASE("expand and restrict round trip") {
    DofMap d(6);
    d.constrain(1, 0.25);
    d.constrain(4);
    const Eigen::VectorXd f = Eigen::Vector4d(1, 2, 3, 4);
    const Eigen::VectorXd full = d.expand(f);
    CHECK(full[1] == 0.25);
    CHECK(full[4] == 0.0);
    CHECK(d.restrict_to_free(full) == f);
  }
}

TEST_CASE("reduced problem is the free block of the full system") {
  const ControlMesh m = fixtures::star(5, 3, 0.2);
  const Discretization disc(m, settings(MaterialParams::mooney_rivlin(1.0, 0.3)));
  ShellProblem prob(disc, build_dof_map(disc.mesh(), {ConstraintRule::boundary({true, true, true})}), 0.2);
  const Eigen::VectorXd u = random_vector(prob.size(), 0.03, 17);
  Linearization lin;
  prob.linearize(u, 1.5, lin, true);

  AssembledSystem full;
  Assembler(disc).assemble(prob.dofs().expand(u), 1.5 * 0.2, full, true);
  const Eigen::MatrixXd K(full.tangent), Kr(lin.tangent);
  const std::vector<int>& fr = prob.dofs().free_dofs();
  double err = 0.0;
  for (int i = 0; i < prob.size(); ++i)
    for (int j = 0; j < prob.size(); ++j) err = std::max(err, std::abs(Kr(i, j) - K(fr[i], fr[j])));
  CHECK(err == 0.0);
  const Eigen::VectorXd r = prob.dofs().restrict_to_free(full.internal_force - 0.3 * full.pressure_force);
  CHECK((lin.residual - r).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((lin.load - 0.2 * prob.dofs().restrict_to_free(full.pressure_force)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(prob.assemblies() == 1);
}

TEST_CASE("rigid motions of a closed control net") {
  const ControlMesh m = fixtures::torus(8, 6);
  const Discretization disc(m, settings(MaterialParams::neo_hookean(1.0)));
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(disc.num_dofs());
  const Eigen::MatrixXd Q = rigid_motions(disc.mesh(), u);
  CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  AssembledSystem sys;
  Assembler(disc).assemble(u, 0.0, sys, true);
  const Eigen::MatrixXd K(sys.tangent);
  CHECK((K * Q).norm() <= 1e-10 * K.norm());

  ShellProblem prob(disc, build_dof_map(disc.mesh(), {ConstraintRule::at_point(disc.mesh().vertex(0), {true, true, true})}),
                    1.0);
  Linearization lin;
  prob.linearize(Eigen::VectorXd::Zero(prob.size()), 0.0, lin, true);
  CHECK(lin.gauge.size() == 0);
  prob.set_rigid_metric(true);
  prob.linearize(Eigen::VectorXd::Zero(prob.size()), 0.0, lin, true);
  REQUIRE(lin.gauge.rows() == prob.size());
  REQUIRE(lin.gauge.cols() == 6);
  for (int i = 0; i < prob.size(); ++i) CHECK(lin.gauge.row(i) == Q.row(prob.dofs().free_dofs()[i]));
}
