#include "app/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "shellpath/error.hpp"

namespace shellpath::app {

const LimitPoint* first_load_maximum(const PathHistory& h, int branch) {
  for (const LimitPoint& lp : h.limit_points) {
    const StepRecord& before = h.records.at(lp.record - 1);
    if (lp.state.branch == branch && before.state.dkappa_prev > 0.0) return &lp;
  }
  return nullptr;
}

std::optional<double> kappa_at_volume(const std::vector<const StepRecord*>& branch, double volume) {
  for (std::size_t i = 1; i < branch.size(); ++i) {
    const double v0 = branch[i - 1]->measures.volume, v1 = branch[i]->measures.volume;
    if ((volume - v0) * (volume - v1) > 0.0 || v0 == v1) continue;
    const double t = (volume - v0) / (v1 - v0);
    return branch[i - 1]->kappa + t * (branch[i]->kappa - branch[i - 1]->kappa);
  }
  return std::nullopt;
}

double rotational_asymmetry(const ControlMesh& mesh, const Eigen::VectorXd& u, const Vec3& axis, double angle) {
  const Eigen::Matrix3d R = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  double scale = 0.0;
  for (const Vec3& x : mesh.vertices()) scale = std::max(scale, x.norm());
  const double tol = 1e-8 * std::max(scale, 1.0);
  double num = 0.0;
  for (int a = 0; a < mesh.num_vertices(); ++a) {
    const Vec3 target = R * mesh.vertex(a);
    int best = -1;
    double bd = std::numeric_limits<double>::max();
    for (int b = 0; b < mesh.num_vertices(); ++b) {
      const double d = (mesh.vertex(b) - target).norm();
      if (d < bd) {
        bd = d;
        best = b;
      }
    }
    if (bd > tol) throw Error("mesh is not invariant under the rotation");
    num += (u.segment<3>(3 * best) - R * u.segment<3>(3 * a)).squaredNorm();
  }
  const double den = u.norm();
  return den > 0.0 ? std::sqrt(num) / den : 0.0;
}

std::vector<double> profile_uz(const Discretization& disc, const Eigen::VectorXd& u, const Vec3& a, const Vec3& b,
                               int samples) {
  std::vector<double> out;
  const Eigen::VectorXd none;
  for (int k = 0; k < samples; ++k) {
    const Vec3 x = a + (b - a) * (static_cast<double>(k) / (samples - 1));
    const SurfacePoint p = disc.closest_point(x);
    out.push_back(disc.evaluate(p, u).x[2] - disc.evaluate(p, none).x[2]);
  }
  return out;
}

int curvature_sign_changes(const std::vector<double>& profile, double rel_floor) {
  std::vector<double> c;
  for (std::size_t k = 1; k + 1 < profile.size(); ++k) c.push_back(profile[k - 1] - 2.0 * profile[k] + profile[k + 1]);
  double big = 0.0;
  for (double v : c) big = std::max(big, std::abs(v));
  int changes = 0, last = 0;
  for (double v : c) {
    if (std::abs(v) <= rel_floor * big) continue;
    const int sgn = v > 0.0 ? 1 : -1;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

}  // namespace shellpath::app
