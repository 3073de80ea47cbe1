#include "shellpath/frames.hpp"

#include <cmath>

#include "shellpath/patch_basis.hpp"

namespace shellpath {

namespace {

Mat2 metric(const std::array<Vec3, 2>& a) { return sym2(a[0].dot(a[0]), a[0].dot(a[1]), a[1].dot(a[1])); }

}  // namespace

ReferenceFrame reference_frame(const SurfaceDerivatives& g, double thickness, int thickness_points) {
  if (!(thickness > 0.0)) throw GeometryError("shell thickness must be positive");
  ReferenceFrame r;
  r.a = g.d1;
  const Vec3 n = r.a[0].cross(r.a[1]);
  r.J = n.norm();
  const double scale = r.a[0].norm() * r.a[1].norm();
  if (!(r.J > 1e-12 * scale) || !std::isfinite(r.J))
    throw GeometryError("degenerate reference surface (|a1 x a2| = " + std::to_string(r.J) + ")");
  r.a3 = n / r.J;
  r.a_cov = metric(r.a);
  r.a_contra = r.a_cov.inverse();
  r.b = sym2(g.d2[0].dot(r.a3), g.d2[1].dot(r.a3), g.d2[2].dot(r.a3));
  r.thickness = thickness;

  // shell-space volume ratio det(I - theta3 b^a_b) = 1 - 2 H theta3 + K theta3^2
  const Mat2 mixed = r.a_contra * r.b;
  const double twoH = mixed.trace(), K = mixed.determinant();
  std::vector<double> x, w;
  gauss_legendre(thickness_points, x, w);
  r.layers.resize(thickness_points);
  for (int i = 0; i < thickness_points; ++i) {
    ThicknessLayer& L = r.layers[i];
    L.theta3 = 0.5 * thickness * x[i];
    const double ratio = 1.0 - twoH * L.theta3 + K * L.theta3 * L.theta3;
    if (!(ratio > 0.0)) throw GeometryError("shell thickness exceeds the radius of curvature");
    L.weight = 0.5 * thickness * w[i] * ratio;
    L.g_cov = r.a_cov - 2.0 * L.theta3 * r.b;
    if (!(L.g_cov.determinant() > 0.0)) throw GeometryError("shell thickness exceeds the radius of curvature");
    L.g_contra = L.g_cov.inverse();
  }
  return r;
}

DeformedFrame deformed_frame(const ReferenceFrame& ref, const SurfaceDerivatives& c, ThicknessModel model) {
  DeformedFrame d;
  d.a = c.d1;
  d.a_d = c.d2;
  d.a3_tilde = d.a[0].cross(d.a[1]);
  d.J = d.a3_tilde.norm();
  if (!(d.J > 1e-14 * ref.J) || !std::isfinite(d.J)) throw GeometryError("degenerate deformed surface (|a1 x a2| vanishes)");
  d.a3 = d.a3_tilde / d.J;
  d.a_cov = metric(d.a);
  d.beta = sym2(d.a_d[0].dot(d.a3), d.a_d[1].dot(d.a3), d.a_d[2].dot(d.a3));
  d.lambda3 = model == ThicknessModel::Incompressible ? ref.J / d.J : 1.0;
  d.b = d.lambda3 * d.beta;
  return d;
}

StrainState strain_state(const ReferenceFrame& ref, const DeformedFrame& def) {
  return {0.5 * (def.a_cov - ref.a_cov), ref.b - def.b};
}

}  // namespace shellpath
