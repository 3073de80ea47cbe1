#include "shellpath/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shellpath/subdivision.hpp"

namespace shellpath {

SurfaceDerivatives combine(const PatchBasis& b, const std::vector<int>& control, const std::vector<Vec3>& pts) {
  SurfaceDerivatives s;
  for (std::size_t a = 0; a < control.size(); ++a) {
    const Vec3& x = pts[control[a]];
    s.x += b.N[a] * x;
    s.d1[0] += b.dN(a, 0) * x;
    s.d1[1] += b.dN(a, 1) * x;
    s.d2[0] += b.d2N(a, 0) * x;
    s.d2[1] += b.d2N(a, 1) * x;
    s.d2[2] += b.d2N(a, 2) * x;
  }
  return s;
}

Discretization::Discretization(const ControlMesh& mesh, ShellSettings settings)
    : mesh_(mesh), settings_(std::move(settings)) {
  settings_.material.validate();
  if (!(settings_.thickness > 0.0)) throw GeometryError("shell thickness must be positive");
  if (settings_.quadrature_points < 1) throw Error("quadrature needs at least one point per direction");
  if (needs_presubdivision(mesh_)) {
    mesh_ = catmull_clark_subdivide(mesh_);
    presubdivisions_ = 1;
  }
  const std::vector<QuadraturePoint> rule = gauss_rule_2d(settings_.quadrature_points);
  elements_.resize(mesh_.num_faces());
  for (int f = 0; f < mesh_.num_faces(); ++f) {
    Element& el = elements_[f];
    el.stencil = patch_stencil(mesh_, f);
    el.points.reserve(rule.size());
    for (const QuadraturePoint& q : rule) {
      QuadratureData d;
      d.basis = evaluate_patch_basis(el.stencil, q.theta1, q.theta2);
      d.weight = q.weight;
      d.reference = combine(d.basis, el.stencil.control, mesh_.vertices());
      try {
        d.frame = reference_frame(d.reference, settings_.thickness, settings_.thickness_points);
      } catch (const GeometryError& e) {
        throw GeometryError("face " + std::to_string(f) + ": " + e.what());
      }
      area_ += d.weight * d.frame.J;
      el.points.push_back(std::move(d));
    }
  }
}

Eigen::MatrixXd Discretization::gather(int e, const Eigen::VectorXd& u) const {
  const std::vector<int>& c = elements_[e].stencil.control;
  Eigen::MatrixXd U(c.size(), 3);
  for (std::size_t a = 0; a < c.size(); ++a) U.row(a) = u.segment<3>(3 * c[a]).transpose();
  return U;
}

SurfaceDerivatives Discretization::evaluate(const SurfacePoint& p, const Eigen::VectorXd& u) const {
  const Element& el = elements_.at(p.face);
  const PatchBasis b = evaluate_patch_basis(el.stencil, p.theta1, p.theta2);
  SurfaceDerivatives s = combine(b, el.stencil.control, mesh_.vertices());
  if (u.size() == 0) return s;
  const Eigen::MatrixXd U = gather(p.face, u);
  for (Eigen::Index a = 0; a < U.rows(); ++a) {
    const Vec3 d = U.row(a).transpose();
    s.x += b.N[a] * d;
    s.d1[0] += b.dN(a, 0) * d;
    s.d1[1] += b.dN(a, 1) * d;
    s.d2[0] += b.d2N(a, 0) * d;
    s.d2[1] += b.d2N(a, 1) * d;
    s.d2[2] += b.d2N(a, 2) * d;
  }
  return s;
}

SurfacePoint Discretization::closest_point(const Vec3& x) const {
  std::vector<std::pair<double, int>> cand;
  for (int f = 0; f < num_elements(); ++f) {
    double best = std::numeric_limits<double>::max();
    for (const QuadratureData& q : elements_[f].points) best = std::min(best, (q.reference.x - x).squaredNorm());
    cand.emplace_back(best, f);
  }
  const std::size_t keep = std::min<std::size_t>(6, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + keep, cand.end());
  SurfacePoint best;
  double best_d = std::numeric_limits<double>::max();
  const Eigen::VectorXd none;
  for (std::size_t c = 0; c < keep; ++c) {
    SurfacePoint p{cand[c].second, 0.5, 0.5};
    for (int it = 0; it < 30; ++it) {
      const SurfaceDerivatives s = evaluate(p, none);
      const Vec3 r = s.x - x;
      Mat2 H;
      H << s.d1[0].dot(s.d1[0]) + r.dot(s.d2[0]), s.d1[0].dot(s.d1[1]) + r.dot(s.d2[1]),
           s.d1[0].dot(s.d1[1]) + r.dot(s.d2[1]), s.d1[1].dot(s.d1[1]) + r.dot(s.d2[2]);
      const Eigen::Vector2d g(s.d1[0].dot(r), s.d1[1].dot(r));
      Eigen::Vector2d step = -H.ldlt().solve(g);
      if (!step.allFinite()) step = -g / (H.diagonal().maxCoeff() + 1e-30);
      p.theta1 = std::clamp(p.theta1 + step[0], 0.0, 1.0);
      p.theta2 = std::clamp(p.theta2 + step[1], 0.0, 1.0);
      if (step.norm() < 1e-14) break;
    }
    const double d = (evaluate(p, none).x - x).norm();
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

}  // namespace shellpath
