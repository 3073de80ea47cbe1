#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"

#include "app/benchmarks.hpp"
#include "app/config.hpp"
#include "app/output.hpp"
#include "app/run.hpp"
#include "shellpath/error.hpp"

using namespace shellpath;
using namespace shellpath::app;

namespace {

const std::string kData = SHELLPATH_TEST_DATA;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_run_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kPlateConfig = R"(geometry:
  benchmark: plate
material:
  model: mooney_rivlin
  c1: 80
  c2: 20
  thickness: 0.5
load:
  reference_pressure: 1
  dkappa0: 0.1
  kappa_target: 2
)";

}  // namespace

TEST_CASE("generator outputs match the golden meshes byte for byte") {
  for (const std::string& name : benchmark_names()) {
    CAPTURE(name);
    std::ostringstream a, b;
    write_control_mesh(a, make_benchmark(name).mesh);
    write_control_mesh(b, make_benchmark(name).mesh);
    CHECK(a.str() == b.str());
    CHECK(a.str() == slurp(kData + "/golden/" + name + ".mesh"));
  }
  std::ostringstream r;
  write_control_mesh(r, make_benchmark("plate", {1, 0, -1.0}).mesh);
  CHECK(r.str() == slurp(kData + "/golden/plate_refine1.mesh"));
}

TEST_CASE("benchmark element counts") {
  CHECK(make_benchmark("plate").mesh.num_faces() == 90);
  CHECK(make_benchmark("plate", {2, 0, -1.0}).mesh.num_faces() == 1440);
  CHECK(make_benchmark("sphere_octant").mesh.num_faces() == 192);
  CHECK(make_benchmark("torus").mesh.num_faces() == 256);
  CHECK(make_benchmark("airbag").mesh.num_faces() == 256);
  CHECK_THROWS_AS(make_benchmark("cylinder"), ConfigError);
  CHECK_THROWS_AS(make_benchmark("plate", {5, 0, -1.0}), ConfigError);
}

TEST_CASE("torus limit surface bounding box") {
  const Benchmark b = make_benchmark("torus");
  const Discretization disc(b.mesh, b.shell);
  const SurfaceSample s = sample_surface(disc, Eigen::VectorXd::Zero(disc.num_dofs()), 8);
  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const Vec3& p : s.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 box(10.6522, 1.80474, 10.6522);
  for (int k = 0; k < 3; ++k) {
    CHECK(hi[k] == doctest::Approx(box[k]).epsilon(1e-3));
    CHECK(-lo[k] == doctest::Approx(box[k]).epsilon(1e-3));
  }
}

TEST_CASE("airbag edges are z-constrained") {
  const Benchmark b = make_benchmark("airbag");
  const DofMap dofs = build_dof_map(b.mesh, b.constraints);
  int on_edge[4] = {0, 0, 0, 0};
  for (int v = 0; v < b.mesh.num_vertices(); ++v) {
    const Vec3& x = b.mesh.vertex(v);
    const bool edge = x.x() == 0.0 || x.x() == 1.0 || x.y() == 0.0 || x.y() == 1.0;
    CHECK(b.mesh.is_boundary_vertex(v) == edge);
    if (!edge) continue;
    CHECK(dofs.is_constrained(3 * v + 2));
    on_edge[0] += x.x() == 0.0;
    on_edge[1] += x.x() == 1.0;
    on_edge[2] += x.y() == 0.0;
    on_edge[3] += x.y() == 1.0;
  }
  for (int e : on_edge) CHECK(e == 17);
  CHECK(b.shell.material.kind == MaterialKind::StVenantKirchhoff);
  CHECK(b.continuation.dkappa0 == 200.0);
}

TEST_CASE("config parsing") {
  SUBCASE("complete benchmark config") {
    const RunConfig c = parse_run_config(kPlateConfig, "cfg.yaml");
    CHECK(c.problem.mesh.num_faces() == 90);
    CHECK(c.problem.shell.thickness == 0.5);
    CHECK(c.problem.continuation.kappa_target == 2.0);
    CHECK(c.problem.continuation.reference_load == 1.0);
    CHECK(c.output.directory == "out");
  }
  SUBCASE("missing material block names the key") {
    const std::string text = std::string(kPlateConfig).substr(0, std::string(kPlateConfig).find("material:")) +
                             std::string(kPlateConfig).substr(std::string(kPlateConfig).find("load:"));
    const std::string err = config_error(text);
    CHECK(err.find("missing key 'material'") != std::string::npos);
    CHECK(err.rfind("cfg.yaml:", 0) == 0);
  }
  SUBCASE("missing nested key names its path and line") {
    std::string text = kPlateConfig;
    text.replace(text.find("  thickness: 0.5\n"), 16, "");
    CHECK(config_error(text) == "cfg.yaml:4:3: missing key 'material.thickness'");
  }
  SUBCASE("unknown key") {
    std::string text = std::string(kPlateConfig) + "solver:\n  tolerance: 1e-3\n";
    CHECK(config_error(text) == "cfg.yaml:13:3: unknown key 'solver.tolerance'");
  }
  SUBCASE("wrong type and nonpositive values") {
    std::string text = kPlateConfig;
    text.replace(text.find("c1: 80"), 6, "c1: abc");
    CHECK(config_error(text) == "cfg.yaml:5:7: 'material.c1' has the wrong type");
    text = kPlateConfig;
    text.replace(text.find("dkappa0: 0.1"), 12, "dkappa0: -1");
    CHECK(config_error(text) == "cfg.yaml:10:12: 'load.dkappa0' must be positive");
  }
  SUBCASE("unknown benchmark and syntax errors carry positions") {
    std::string text = kPlateConfig;
    text.replace(text.find("plate"), 5, "plat");
    CHECK(config_error(text).rfind("cfg.yaml:2:14: unknown benchmark 'plat'", 0) == 0);
    CHECK(config_error("geometry: [1\n").rfind("cfg.yaml:2:", 0) == 0);
    CHECK(config_error("").find("empty") != std::string::npos);
  }
  SUBCASE("branching needs the eigenvalue checks") {
    const std::string text = std::string(kPlateConfig) + "stability:\n  enabled: false\n  branching: true\n";
    CHECK(config_error(text).find("needs 'stability.enabled'") != std::string::npos);
  }
}

TEST_CASE("mesh config resolves paths relative to the file") {
  const RunConfig c = load_run_config(kData + "/clamped_square.yaml");
  CHECK(c.problem.mesh.num_faces() == 256);
  REQUIRE(c.problem.constraints.size() == 1);
  CHECK(c.problem.constraints[0].selector == ConstraintRule::Selector::Boundary);
  CHECK(c.output.snapshot_every == 2);
  CHECK_THROWS_WITH_AS(load_run_config(kData + "/missing_material.yaml"), doctest::Contains("missing key 'material'"),
                       ConfigError);
}

TEST_CASE("history round trip and validation") {
  StepRecord r;
  r.step = 3;
  r.branch = 1;
  r.kappa = 0.25;
  r.pressure = 1.0 / 3.0;
  r.measures.volume = 12.5;
  r.measures.max_disp = 1e-7;
  r.eigenvalues = Eigen::Vector2d(-0.5, 2.0);
  r.newton_iters = 4;
  std::stringstream s;
  s << kHistoryVersion << '\n' << history_header(3) << '\n' << format_row(history_row(r, 3)) << '\n';
  const History h = read_history(s, "h.csv");
  CHECK(h.modes == 3);
  REQUIRE(h.rows.size() == 1);
  const HistoryRow& row = h.rows[0];
  CHECK(row.step == 3);
  CHECK(row.branch == 1);
  CHECK(row.pressure == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(row.eigenvalues[0] == -0.5);
  CHECK(std::isnan(row.eigenvalues[2]));
  CHECK(row.newton_iters == 4);

  std::stringstream bad_version("# shellpath history v0\n");
  CHECK_THROWS_WITH(read_history(bad_version, "h.csv"), doctest::Contains("h.csv:1:"));
  std::stringstream bad_columns(std::string(kHistoryVersion) + "\nstep,branch,kappa\n");
  CHECK_THROWS_WITH(read_history(bad_columns, "h.csv"), doctest::Contains("h.csv:2:"));
  std::stringstream short_row(std::string(kHistoryVersion) + "\n" + history_header(0) + "\n1,0,0.1,0.1,1,1,3\n1,0,0.1\n");
  CHECK_THROWS_WITH(read_history(short_row, "h.csv"), doctest::Contains("h.csv:4: expected 7 fields"));
  std::stringstream bad_int(std::string(kHistoryVersion) + "\n" + history_header(0) + "\n1.5,0,0.1,0.1,1,1,3\n");
  CHECK_THROWS_WITH(read_history(bad_int, "h.csv"), doctest::Contains("'step' is not an integer"));
}

TEST_CASE("surface snapshot counts and values") {
  const Benchmark b = make_benchmark("airbag");
  const Discretization disc(b.mesh, b.shell);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(disc.num_dofs());
  for (int v = 0; v < disc.mesh().num_vertices(); ++v) {
    const Vec3& x = disc.mesh().vertex(v);
    u[3 * v + 2] = 0.05 * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  }
  const SurfaceSample s = sample_surface(disc, u, 3);
  CHECK(s.points.size() == 256u * 16);
  CHECK(s.cells.size() == 256u * 9);
  CHECK(s.disp_norm.size() == s.points.size());
  CHECK(s.energy_density.size() == s.cells.size());
  for (double e : s.energy_density) CHECK(e >= 0.0);
  for (std::size_t p = 0; p < s.points.size(); ++p) CHECK(s.disp_norm[p] == doctest::Approx(std::abs(s.disp_z[p])));

  std::ostringstream a, b2;
  write_surface_vtk(a, s, "t");
  write_surface_vtk(b2, sample_surface(disc, u, 3), "t");
  CHECK(a.str() == b2.str());
  CHECK(a.str().find("POINTS 4096 double") != std::string::npos);
  CHECK(a.str().find("CELLS 2304 11520") != std::string::npos);
  CHECK(a.str().find("CELL_DATA 2304\nSCALARS energy_density") != std::string::npos);

  std::ostringstream c;
  write_control_vtk(c, disc.mesh(), u, "t");
  CHECK(c.str().find("POINTS 289 double") != std::string::npos);

  SurfaceSample broken = s;
  broken.energy_density[5] = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream d;
  CHECK_THROWS_AS(write_surface_vtk(d, broken, "t"), Error);
}

TEST_CASE("run writes history, snapshots at the cadence and provenance") {
  RunConfig cfg = load_run_config(kData + "/clamped_square.yaml");
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "shellpath_test_run";
  std::filesystem::remove_all(dir);
  cfg.output.directory = dir.string();
  cfg.output.snapshot_every = 2;
  cfg.problem.continuation.kappa_target = 4.0;
  std::ostringstream log;
  const RunSummary sum = run_problem(cfg.problem, cfg.output, nlohmann::json::array(), log);
  CHECK_FALSE(sum.aborted);
  const History h = read_history((dir / "history.csv").string());
  CHECK(h.modes == 3);
  CHECK(static_cast<int>(h.rows.size()) == sum.rows);
  REQUIRE(sum.rows >= 3);
  CHECK(h.rows.back().kappa == doctest::Approx(4.0));
  for (int row = 0; row < sum.rows; ++row) {
    CAPTURE(row);
    CHECK(std::filesystem::exists(dir / snapshot_name(row)) == has_snapshot(row, sum.rows, 2));
    CHECK(std::filesystem::exists(dir / control_snapshot_name(row)) == has_snapshot(row, sum.rows, 2));
  }
  for (std::size_t k = 1; k < h.rows.size(); ++k) CHECK(h.rows[k].max_disp > h.rows[k - 1].max_disp);
  const nlohmann::json run = nlohmann::json::parse(slurp((dir / "run.json").string()));
  CHECK(run["result"]["rows"] == sum.rows);
  CHECK(run["config"]["material"]["c1"] == 100.0);
  CHECK(run["history"]["columns"] == history_header(3));
  CHECK(slurp((dir / "plot_history.py").string()).find("history.csv") != std::string::npos);
  std::filesystem::remove_all(dir);
}
