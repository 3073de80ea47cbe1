#include "shellpath/resultants.hpp"

#include <cmath>

namespace shellpath {

StressResultants stress_resultants(const MaterialParams& params, const ReferenceFrame& ref, const StrainState& strain) {
  StressResultants r;
  for (const ThicknessLayer& L : ref.layers) {
    const Mat2 E = strain.eps + L.theta3 * strain.kappa;
    const Mat2 C = L.g_cov + 2.0 * E;
    const double detC = C.determinant();
    if (!(detC > 0.0)) throw ConstitutiveError("in-plane metric is not positive definite");
    const double lambda3 = std::sqrt(L.g_cov.determinant() / detC);
    const MaterialResponse mr = material_response(params, L.g_contra, C, lambda3);
    const Eigen::Vector3d s = to_voigt_stress(mr.S);
    const double w = L.weight, z = L.theta3;
    r.n += w * s;
    r.m += (w * z) * s;
    r.Dnn += w * mr.tangent;
    r.Dnm += (w * z) * mr.tangent;
    r.Dmm += (w * z * z) * mr.tangent;
    r.energy += w * mr.energy;
  }
  return r;
}

}  // namespace shellpath
