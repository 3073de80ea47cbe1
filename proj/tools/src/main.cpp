#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "app/config.hpp"
#include "app/run.hpp"
#include "shellpath/discretization.hpp"
#include "shellpath/error.hpp"

using namespace shellpath;

namespace {

constexpr int kFailed = 1;
constexpr int kBadConfig = 2;
constexpr int kAborted = 3;

int finish(const app::RunSummary& s) {
  std::cout << s.rows << " history rows, " << s.snapshots << " snapshots\n";
  if (s.aborted) {
    std::cerr << "error: solver aborted: " << s.termination << '\n';
    return kAborted;
  }
  return 0;
}

int mesh_info(const std::string& path) {
  const ControlMesh m = load_control_mesh(path);
  std::map<int, int> valences;
  int extraordinary = 0;
  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (int v = 0; v < m.num_vertices(); ++v) {
    ++valences[m.valence(v)];
    if (!m.is_boundary_vertex(v) && m.valence(v) != 4) ++extraordinary;
    lo = lo.cwiseMin(m.vertex(v));
    hi = hi.cwiseMax(m.vertex(v));
  }
  std::printf("vertices        %d\nfaces           %d\nedges           %d\nboundary edges  %d\n", m.num_vertices(),
              m.num_faces(), m.num_edges(), m.num_boundary_edges());
  std::printf("euler           %d\nclosed          %s\nextraordinary   %d\n",
              m.num_vertices() - m.num_edges() + m.num_faces(), m.is_closed() ? "yes" : "no", extraordinary);
  std::printf("valences       ");
  for (const auto& [val, count] : valences) std::printf(" %d:%d", val, count);
  std::printf("\nbounding box    [%g, %g] x [%g, %g] x [%g, %g]\n", lo.x(), hi.x(), lo.y(), hi.y(), lo.z(), hi.z());
  const Discretization disc(m, ShellSettings{1.0, MaterialParams::neo_hookean(1.0)});
  std::printf("presubdivisions %d\nlimit area      %.10g\n", disc.presubdivisions(), disc.reference_area());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Thin-shell path following on subdivision surfaces"};
  cli.require_subcommand(1);

  std::string bench_name, bench_out;
  app::BenchmarkOptions bench_opts;
  app::OutputSettings bench_output;
  std::string export_mesh;
  bool no_stability = false;
  CLI::App* bench = cli.add_subcommand("bench", "Run a built-in benchmark");
  bench->add_option("name", bench_name, "plate, sphere_octant, sphere, torus or airbag")->required();
  bench->add_option("--refine", bench_opts.refine, "Uniform refinements of the control mesh")->check(CLI::Range(0, 4));
  bench->add_option("--case", bench_opts.case_id, "Material case of the balloon and torus")->check(CLI::Range(1, 2));
  bench->add_option("--pressure", bench_opts.pressure, "Target pressure")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "Output directory (default out/<name>)");
  bench->add_option("--snapshot-every", bench_output.snapshot_every, "Snapshot cadence in history rows")
      ->check(CLI::NonNegativeNumber);
  bench->add_flag("--no-stability", no_stability, "Skip the eigenvalue checks");
  bench->add_option("--export-mesh", export_mesh, "Write the control mesh to this file and exit");

  std::string config_path, run_out;
  CLI::App* run = cli.add_subcommand("run", "Run a configuration file");
  run->add_option("--config", config_path, "YAML run configuration")->required();
  run->add_option("--out", run_out, "Override output.directory");

  std::string mesh_path;
  CLI::App* info = cli.add_subcommand("mesh-info", "Summarize a control mesh file");
  info->add_option("path", mesh_path, "Quad mesh in the ASCII format")->required();

  CLI11_PARSE(cli, argc, argv);

  nlohmann::json invocation = nlohmann::json::array();
  for (int i = 1; i < argc; ++i) invocation.push_back(argv[i]);

  try {
    if (*bench) {
      app::Benchmark b = app::make_benchmark(bench_name, bench_opts);
      if (!export_mesh.empty()) {
        std::ofstream out(export_mesh, std::ios::binary);
        if (!out) throw Error("cannot write " + export_mesh);
        write_control_mesh(out, b.mesh);
        for (const ConstraintRule& r : b.constraints) std::cout << r.describe() << '\n';
        return 0;
      }
      if (no_stability) {
        b.continuation.check_stability = false;
        b.continuation.branching = false;
      }
      bench_output.directory = bench_out.empty() ? "out/" + bench_name : bench_out;
      return finish(app::run_problem(b, bench_output, invocation, std::cout));
    }
    if (*run) {
      app::RunConfig cfg = app::load_run_config(config_path);
      if (!run_out.empty()) cfg.output.directory = run_out;
      return finish(app::run_problem(cfg.problem, cfg.output, invocation, std::cout));
    }
    return mesh_info(mesh_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
