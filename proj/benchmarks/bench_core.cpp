#include <benchmark/benchmark.h>

#include "app/benchmarks.hpp"
#include "shellpath/assembler.hpp"
#include "shellpath/patch_basis.hpp"
#include "shellpath/stability.hpp"

using namespace shellpath;

namespace {

struct Loaded {
  app::Benchmark bench;
  Discretization disc;
  ShellProblem problem;

  Loaded(const std::string& name, int refine)
      : bench(app::make_benchmark(name, {refine})),
        disc(bench.mesh, bench.shell),
        problem(disc, build_dof_map(disc.mesh(), bench.constraints), bench.reference_pressure) {}
};

void BM_RegularBasis(benchmark::State& state) {
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  Eigen::Matrix<double, Eigen::Dynamic, 3> d2N;
  double t = 0.0;
  for (auto _ : state) {
    t = t > 0.9 ? 0.05 : t + 0.013;
    regular_slot_basis(t, 1.0 - t, N, dN, d2N);
    benchmark::DoNotOptimize(N.data());
  }
}
BENCHMARK(BM_RegularBasis);

void BM_IrregularBasis(benchmark::State& state) {
  const int valence = static_cast<int>(state.range(0));
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  Eigen::Matrix<double, Eigen::Dynamic, 3> d2N;
  double t = 0.0;
  for (auto _ : state) {
    t = t > 0.9 ? 0.05 : t + 0.013;
    irregular_slot_basis(valence, t, 0.5 * t, N, dN, d2N);
    benchmark::DoNotOptimize(N.data());
  }
}
BENCHMARK(BM_IrregularBasis)->Arg(3)->Arg(5)->Arg(6);

void BM_Assemble(benchmark::State& state) {
  Loaded m("sphere_octant", static_cast<int>(state.range(0)));
  Assembler assembler(m.disc);
  const Eigen::VectorXd u = 1e-3 * Eigen::VectorXd::Random(3 * m.disc.mesh().num_vertices());
  AssembledSystem out;
  const bool tangent = state.range(1) != 0;
  for (auto _ : state) {
    assembler.assemble(u, 1.0, out, tangent);
    benchmark::DoNotOptimize(out.energy);
  }
  state.counters["elements"] = m.disc.num_elements();
}
BENCHMARK(BM_Assemble)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Stability(benchmark::State& state) {
  Loaded m("sphere_octant", static_cast<int>(state.range(0)));
  Linearization lin;
  m.problem.linearize(Eigen::VectorXd::Zero(m.problem.size()), 0.0, lin, true);
  const StabilitySettings settings;
  for (auto _ : state) {
    const StabilityReport r = stability_check(lin.tangent, settings, lin.load);
    benchmark::DoNotOptimize(r.eigenvalues.data());
  }
  state.counters["dofs"] = m.problem.size();
}
BENCHMARK(BM_Stability)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
