#include "shellpath/volume.hpp"

namespace shellpath {

namespace {

template <class F>
double integrate(const Discretization& disc, const Eigen::VectorXd& u, F&& f) {
  double total = 0.0;
  for (int e = 0; e < disc.num_elements(); ++e) {
    const Element& el = disc.element(e);
    const Eigen::MatrixXd U = u.size() ? disc.gather(e, u) : Eigen::MatrixXd::Zero(el.stencil.control.size(), 3);
    for (const QuadratureData& q : el.points) {
      Vec3 x = q.reference.x, g1 = q.reference.d1[0], g2 = q.reference.d1[1];
      for (Eigen::Index a = 0; a < U.rows(); ++a) {
        const Vec3 d = U.row(a).transpose();
        x += q.basis.N[a] * d;
        g1 += q.basis.dN(a, 0) * d;
        g2 += q.basis.dN(a, 1) * d;
      }
      total += q.weight * f(x, g1.cross(g2));
    }
  }
  return total;
}

}  // namespace

double enclosed_volume(const Discretization& disc, const Eigen::VectorXd& u, const Vec3& apex) {
  return integrate(disc, u, [&](const Vec3& x, const Vec3& n) { return (x - apex).dot(n) / 3.0; });
}

double surface_area(const Discretization& disc, const Eigen::VectorXd& u) {
  return integrate(disc, u, [](const Vec3&, const Vec3& n) { return n.norm(); });
}

}  // namespace shellpath
