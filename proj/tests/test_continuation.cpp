#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "doctest.h"
#include "shellpath/continuation.hpp"
#include "shellpath/error.hpp"

using namespace shellpath;

namespace {

/// R(u, kappa) = fint(u) - kappa * load with constant load and dense Jacobian.
class ToySystem : public NonlinearSystem {
public:
  using Fint = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Jac = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  ToySystem(Fint f, Jac j, Eigen::VectorXd load) : f_(std::move(f)), j_(std::move(j)), load_(std::move(load)) {}
  int size() const override { return static_cast<int>(load_.size()); }
  void linearize(const Eigen::VectorXd& u, double kappa, Linearization& out, bool need_tangent) override {
    ++calls;
    out.load = load_;
    out.residual = f_(u) - kappa * load_;
    if (need_tangent) {
      out.tangent = j_(u).sparseView(0.0, 0.0);
      out.tangent.makeCompressed();
    }
  }
  int calls = 0;

private:
  Fint f_;
  Jac j_;
  Eigen::VectorXd load_;
};

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Eigen::MatrixXd mat1(double a) { return Eigen::MatrixXd::Constant(1, 1, a); }

/// f(u) = 2u - 3u^2 + u^3, limit points where f' = 0.
ToySystem limit_toy() {
  return ToySystem([](const Eigen::VectorXd& u) { return vec({2 * u[0] - 3 * u[0] * u[0] + u[0] * u[0] * u[0]}); },
                   [](const Eigen::VectorXd& u) { return mat1(2 - 6 * u[0] + 3 * u[0] * u[0]); }, vec({1.0}));
}

/// Gradient of E = u1^2/2 + (1 - u1) u2^2 / 2 + u2^4 / 4 - kappa u1: pitchfork at kappa = 1.
ToySystem pitchfork_toy() {
  return ToySystem(
      [](const Eigen::VectorXd& u) { return vec({u[0] - 0.5 * u[1] * u[1], (1 - u[0]) * u[1] + u[1] * u[1] * u[1]}); },
      [](const Eigen::VectorXd& u) {
        Eigen::MatrixXd K(2, 2);
        K << 1, -u[1], -u[1], 1 - u[0] + 3 * u[1] * u[1];
        return K;
      },
      vec({1.0, 0.0}));
}

MeasureFn first_component() {
  return [](const Eigen::VectorXd& u) {
    Measures m;
    m.volume = u[0];
    m.max_disp = u.cwiseAbs().maxCoeff();
    return m;
  };
}

}  // namespace

TEST_CASE("Newton corrector") {
  TangentSolver solver;
  SUBCASE("linear residual converges in one iteration") {
    Eigen::MatrixXd K0(3, 3);
    K0 << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Eigen::VectorXd f = vec({1, 2, 3});
    ToySystem sys([&](const Eigen::VectorXd& u) { return K0 * u; }, [&](const Eigen::VectorXd&) { return K0; }, f);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
    const NewtonResult r = newton_correct(sys, u, 1.0, NewtonSettings{}, solver);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK((K0 * u - f).norm() < 1e-14);
  }
  SUBCASE("equilibrium start needs no iteration") {
    ToySystem sys = limit_toy();
    Eigen::VectorXd u = vec({0.0});
    const NewtonResult r = newton_correct(sys, u, 0.0, NewtonSettings{}, solver);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
  }
  SUBCASE("scalar cubic") {
    ToySystem sys([](const Eigen::VectorXd& u) { return vec({u[0] * u[0] * u[0] - 8.0}); },
                  [](const Eigen::VectorXd& u) { return mat1(3 * u[0] * u[0]); }, vec({1.0}));
    Eigen::VectorXd u = vec({3.0});
    NewtonSettings s;
    s.tol_rel = 1e-14;
    const NewtonResult r = newton_correct(sys, u, 0.0, s, solver);
    CHECK(r.converged);
    CHECK(r.iterations <= 8);
    CHECK(std::abs(u[0] - 2.0) < 1e-10);
  }
  SUBCASE("iteration limit reports non-convergence") {
    ToySystem sys([](const Eigen::VectorXd& u) { return vec({std::atan(u[0])}); },
                  [](const Eigen::VectorXd& u) { return mat1(1.0 / (1.0 + u[0] * u[0])); }, vec({1.0}));
    Eigen::VectorXd u = vec({3.0});
    NewtonSettings s;
    s.max_iter = 4;
    s.line_search = 0;
    const NewtonResult r = newton_correct(sys, u, 0.0, s, solver);
    CHECK_FALSE(r.converged);
    CHECK(u[0] == 3.0);
  }
  SUBCASE("backtracking recovers a diverging full step") {
    ToySystem sys([](const Eigen::VectorXd& u) { return vec({std::atan(u[0])}); },
                  [](const Eigen::VectorXd& u) { return mat1(1.0 / (1.0 + u[0] * u[0])); }, vec({1.0}));
    Eigen::VectorXd u = vec({3.0});
    NewtonSettings s;
    s.tol_rel = 1e-12;
    const NewtonResult r = newton_correct(sys, u, 0.0, s, solver);
    CHECK(r.converged);
    CHECK(std::abs(u[0]) < 1e-10);
  }
  SUBCASE("singular tangent") {
    ToySystem sys([](const Eigen::VectorXd& u) { return vec({u[0], 0.0 * u[1] + 1.0}); },
                  [](const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::Vector2d(1.0, 0.0).asDiagonal()); },
                  vec({0.0, 0.0}));
    Eigen::VectorXd u = vec({1.0, 1.0});
    CHECK_THROWS_AS(newton_correct(sys, u, 0.0, NewtonSettings{}, solver), SolverError);
  }
}

TEST_CASE("arc-length step on a linear scalar system") {
  ToySystem sys([](const Eigen::VectorXd& u) { return u; }, [](const Eigen::VectorXd&) { return mat1(1.0); }, vec({1.0}));
  ContinuationState st = ContinuationState::at_rest(1);
  st.du_prev = vec({1.0});
  st.dkappa_prev = 0.3;
  ArcLengthSettings s;
  s.psi = 1.0;
  s.tol_rel = 1e-12;
  TangentSolver solver;
  const double ds = 0.5;
  const StepResult r = arc_length_step(sys, st, ds, s, solver);
  REQUIRE(r.converged);
  CHECK(st.u[0] == doctest::Approx(ds / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(st.kappa == doctest::Approx(ds / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.constraint_error <= 1e-8);
}

TEST_CASE("arc-length needs a previous increment") {
  ToySystem sys = limit_toy();
  ContinuationState st = ContinuationState::at_rest(1);
  TangentSolver solver;
  CHECK_THROWS_AS(arc_length_step(sys, st, 0.1, ArcLengthSettings{}, solver), Error);
}

TEST_CASE("continuation passes limit points") {
  ToySystem sys = limit_toy();
  ContinuationSettings s;
  s.dkappa0 = 0.05;
  s.kappa_target = 1.5;
  s.volume_target = 2.6;
  s.solver.tol_rel = 1e-8;
  s.max_steps = 400;
  const PathHistory h = run_continuation(sys, s, first_component());
  CHECK_FALSE(h.aborted);
  CHECK(h.failed_attempts == 0);
  REQUIRE(h.records.size() > 10);

  int sign_changes = 0, limit_flags = 0;
  for (std::size_t i = 1; i < h.records.size(); ++i) {
    const StepRecord& a = h.records[i - 1];
    const StepRecord& b = h.records[i];
    const double u = b.state.u[0];
    CHECK(std::abs(2 * u - 3 * u * u + u * u * u - b.kappa) < 1e-8);
    CHECK(b.state.u[0] > a.state.u[0]);
    CHECK(b.state.du_prev.dot(a.state.du_prev.size() ? a.state.du_prev : b.state.du_prev) > 0.0);
    if (i >= 2) {
      const double d0 = a.kappa - h.records[i - 2].kappa, d1 = b.kappa - a.kappa;
      if (d0 * d1 < 0) ++sign_changes;
    }
    if (b.zero_crossing && b.classification == StabilityClass::LimitLike) ++limit_flags;
  }
  CHECK(sign_changes == 2);
  CHECK(limit_flags > 0);

  REQUIRE(h.limit_points.size() == 2);
  const double roots[2] = {1 - 1 / std::sqrt(3.0), 1 + 1 / std::sqrt(3.0)};
  for (int k = 0; k < 2; ++k) {
    const LimitPoint& lp = h.limit_points[k];
    const double u = roots[k];
    CHECK(lp.state.u[0] == doctest::Approx(u).epsilon(1e-3));
    CHECK(lp.state.kappa == doctest::Approx(2 * u - 3 * u * u + u * u * u).epsilon(1e-6));
    CHECK(lp.measures.volume == lp.state.u[0]);
    REQUIRE(lp.record >= 1);
    CHECK(h.records[lp.record - 1].state.u[0] <= lp.state.u[0]);
    CHECK(h.records[lp.record].state.u[0] >= lp.state.u[0]);
  }
  s.locate_limits = false;
  CHECK(run_continuation(sys, s, first_component()).limit_points.empty());
}

TEST_CASE("pitchfork: detection and branch switching") {
  ToySystem sys = pitchfork_toy();
  ContinuationSettings s;
  s.dkappa0 = 0.1;
  s.kappa_target = 3.0;
  s.ds_max_factor = 1.0;
  s.solver.tol_rel = 1e-10;
  s.branching = true;
  s.beta = 1.0;
  s.thickness = 0.3;
  const PathHistory h = run_continuation(sys, s, first_component());
  INFO(h.termination);
  CHECK_FALSE(h.aborted);
  REQUIRE(h.branch_points.size() == 1);
  const BranchPoint& bp = h.branch_points.front();
  CHECK(bp.state.kappa > 1.0 - 1e-5);
  CHECK(bp.state.kappa < 1.3);
  CHECK(std::abs(bp.mode[1]) == doctest::Approx(1.0));

  const auto principal = h.branch(0);
  const auto bifurcated = h.branch(1);
  REQUIRE(bifurcated.size() > 3);
  for (const StepRecord* r : principal) CHECK(r->state.u[1] == 0.0);
  for (const StepRecord* r : bifurcated) {
    const double u2 = r->state.u[1];
    CHECK(std::abs(u2) > 0.1);
    CHECK(r->kappa == doctest::Approx(1.0 + 0.5 * u2 * u2).epsilon(1e-8));
    CHECK_FALSE(r->zero_crossing);
  }
  CHECK(principal.back()->kappa == doctest::Approx(3.0));
  CHECK(bifurcated.back()->kappa == doctest::Approx(3.0));
}

TEST_CASE("continuation bookkeeping") {
  SUBCASE("zero target records only the rest state") {
    ToySystem sys = limit_toy();
    ContinuationSettings s;
    s.kappa_target = 0.0;
    const PathHistory h = run_continuation(sys, s, first_component());
    REQUIRE(h.records.size() == 1);
    CHECK(h.records[0].state.u[0] == 0.0);
    CHECK(h.records[0].kappa == 0.0);
  }
  SUBCASE("identical runs give identical histories") {
    ContinuationSettings s;
    s.kappa_target = 1.5;
    s.volume_target = 2.6;
    s.branching = true;
    std::vector<double> a, b;
    for (std::vector<double>* out : {&a, &b}) {
      ToySystem sys = limit_toy();
      const PathHistory h = run_continuation(sys, s, first_component(), [&](const StepRecord& r) {
        out->push_back(r.kappa);
        out->push_back(r.state.u[0]);
        for (double e : r.eigenvalues) out->push_back(e);
      });
    }
    CHECK(a == b);
  }
  SUBCASE("every recorded state satisfies its tolerance and the constraint") {
    ToySystem sys = limit_toy();
    ContinuationSettings s;
    s.kappa_target = 1.5;
    s.volume_target = 2.6;
    const PathHistory h = run_continuation(sys, s, first_component());
    for (const StepRecord& r : h.records) {
      if (r.step == 0) continue;
      CHECK(r.residual <= std::max(s.solver.tol_rel * r.reference, 1e-12));
      const double g = r.state.du_prev.squaredNorm() - r.state.ds * r.state.ds;
      if (r.step > 1 && r.kappa != s.kappa_target) CHECK(std::abs(g) <= 1e-8 * r.state.ds * r.state.ds);
    }
  }
  SUBCASE("restart from a recorded step reproduces the continuation") {
    ToySystem sys = limit_toy();
    ContinuationSettings s;
    s.kappa_target = 1.5;
    s.volume_target = 2.6;
    s.check_stability = false;
    PathHistory h = run_continuation(sys, s, first_component());
    REQUIRE(h.records.size() > 6);
    PathHistory resumed;
    resumed.ds_seed = h.ds_seed;
    trace_branch(sys, h.records[4].state, s, first_component(), resumed);
    REQUIRE(resumed.records.size() > 1);
    CHECK(resumed.records[0].step == h.records[5].step);
    CHECK(resumed.records.back().state.u[0] == doctest::Approx(h.records.back().state.u[0]).epsilon(1e-6));
  }
}

TEST_CASE("branch perturbation scaling") {
  const Eigen::VectorXd mode = vec({0.2, -0.6, 0.3});
  CHECK(branch_perturbation(mode, 0.0, 0.01).cwiseAbs().maxCoeff() == 0.0);
  CHECK(branch_perturbation(mode, 1.0, 0.01).cwiseAbs().maxCoeff() == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(branch_perturbation(mode, 2.5, 0.01).cwiseAbs().maxCoeff() == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("stability check") {
  SUBCASE("diagonal matrix") {
    Eigen::SparseMatrix<double> K(3, 3);
    K.insert(0, 0) = 2;
    K.insert(1, 1) = 5;
    K.insert(2, 2) = 9;
    K.makeCompressed();
    StabilitySettings s;
    s.modes = 1;
    const StabilityReport r = stability_check(K, s);
    REQUIRE(r.ok);
    CHECK(r.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(r.eigenvectors(0, 0) == doctest::Approx(1.0));
    CHECK_FALSE(r.zero_crossing);
    CHECK(r.classification == StabilityClass::Stable);
  }
  SUBCASE("random SPD matrices, dense and inverse iteration") {
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    const int n = 60;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = nd(rng);
    const Eigen::MatrixXd A = B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::SparseMatrix<double> K = A.sparseView();
    K.makeCompressed();
    StabilitySettings s;
    s.modes = 4;
    const StabilityReport dense = stability_check(K, s);
    s.dense_limit = 10;
    const StabilityReport iter = stability_check(K, s);
    REQUIRE(dense.ok);
    REQUIRE(iter.ok);
    const double scale = A.diagonal().mean();
    for (const StabilityReport* r : {&dense, &iter})
      for (int e = 0; e < 4; ++e) {
        const Eigen::VectorXd v = r->eigenvectors.col(e);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((A * v - r->eigenvalues[e] * v).norm() <= 1e-8 * scale);
      }
    CHECK((dense.eigenvalues - iter.eigenvalues).cwiseAbs().maxCoeff() < 1e-9 * scale);
  }
  SUBCASE("gauge metric") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    const int n = 40;
    Eigen::MatrixXd B(n, n), G(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) B(i, j) = nd(rng);
      for (int j = 0; j < 3; ++j) G(i, j) = nd(rng);
    }
    const Eigen::MatrixXd A = B * B.transpose() / n - 0.3 * Eigen::MatrixXd::Identity(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd U = 0.9 * (qr.householderQ() * Eigen::MatrixXd::Identity(n, 3));
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - U * U.transpose();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(A, M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(A);
    Eigen::SparseMatrix<double> K = A.sparseView();
    K.makeCompressed();
    const Eigen::VectorXd load = Eigen::VectorXd::Ones(n);
    StabilitySettings s;
    s.modes = 4;
    s.zero_tol = 1e-12;
    const StabilityReport dense = stability_check(K, s, load, U);
    s.dense_limit = 10;
    s.max_iter = 5000;
    const StabilityReport iter = stability_check(K, s, load, U);
    REQUIRE(dense.ok);
    REQUIRE(iter.ok);
    for (int e = 0; e < 4; ++e) {
      CHECK(dense.eigenvalues[e] == doctest::Approx(ref.eigenvalues()[e]).epsilon(1e-10));
      const Eigen::VectorXd z = dense.eigenvectors.col(e);
      CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((A * z - dense.eigenvalues[e] * M * z).norm() < 1e-10);
      const double a = std::abs(z.dot(load)) / std::sqrt(z.dot(M * z) * load.dot(M.inverse() * load));
      CHECK(dense.alignments[e] == doctest::Approx(a).epsilon(1e-10));
    }
    const int negatives = static_cast<int>((ref.eigenvalues().array() < 0.0).count());
    CHECK(negatives == (plain.eigenvalues().array() < 0.0).count());
    CHECK(std::min(negatives, 4) == dense.negative);
    std::vector<double> nearest(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
    std::sort(nearest.begin(), nearest.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    nearest.resize(4);
    std::sort(nearest.begin(), nearest.end());
    for (int e = 0; e < 4; ++e) CHECK(iter.eigenvalues[e] == doctest::Approx(nearest[e]).epsilon(1e-8));
    CHECK_FALSE(stability_check(K, s, load, U / 0.9).ok);
  }
  SUBCASE("classification by load alignment") {
    Eigen::SparseMatrix<double> K(2, 2);
    K.insert(0, 0) = -1e-3;
    K.insert(1, 1) = 1;
    K.makeCompressed();
    CHECK(stability_check(K, {}, vec({1.0, 0.0})).classification == StabilityClass::LimitLike);
    CHECK(stability_check(K, {}, vec({0.0, 1.0})).classification == StabilityClass::BifurcationLike);
  }
}
