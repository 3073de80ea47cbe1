#include "shellpath/material.hpp"

#include <cmath>
#include <sstream>

namespace shellpath {

namespace {

constexpr int kVoigt[3][2] = {{0, 0}, {1, 1}, {0, 1}};

}  // namespace

double MaterialParams::shear_modulus() const {
  if (kind == MaterialKind::MooneyRivlin) return 2.0 * (c1 + c2);
  return young / (2.0 * (1.0 + poisson));
}

void MaterialParams::validate() const {
  if (kind == MaterialKind::MooneyRivlin) {
    if (!(c1 >= 0.0) || !(c2 >= 0.0) || !(c1 + c2 > 0.0))
      throw ConstitutiveError("Mooney-Rivlin constants must satisfy c1 >= 0, c2 >= 0, c1 + c2 > 0");
  } else {
    if (!(young > 0.0)) throw ConstitutiveError("Young's modulus must be positive");
    if (!(poisson > -1.0 && poisson < 0.5)) throw ConstitutiveError("Poisson's ratio must lie in (-1, 0.5)");
  }
}

std::string MaterialParams::describe() const {
  std::ostringstream s;
  if (kind == MaterialKind::MooneyRivlin)
    s << (c2 == 0.0 ? "neo-Hookean" : "Mooney-Rivlin") << " c1=" << c1 << " c2=" << c2;
  else
    s << "St. Venant-Kirchhoff E=" << young << " nu=" << poisson;
  return s.str();
}

MaterialResponse material_response(const MaterialParams& p, const Mat2& G, const Mat2& C, double lambda3) {
  MaterialResponse out;
  if (p.kind == MaterialKind::StVenantKirchhoff) {
    const double lam = p.young * p.poisson / (1.0 - p.poisson * p.poisson);
    const double mu = p.young / (2.0 * (1.0 + p.poisson));
    const Mat2 E = 0.5 * (C - G.inverse());
    for (int I = 0; I < 3; ++I)
      for (int Jv = 0; Jv < 3; ++Jv) {
        const int a = kVoigt[I][0], b = kVoigt[I][1], c = kVoigt[Jv][0], d = kVoigt[Jv][1];
        out.tangent(I, Jv) = lam * G(a, b) * G(c, d) + mu * (G(a, c) * G(b, d) + G(a, d) * G(b, c));
      }
    const Eigen::Vector3d e(E(0, 0), E(1, 1), 2.0 * E(0, 1));
    const Eigen::Vector3d s = out.tangent * e;
    out.S = sym2(s[0], s[2], s[1]);
    out.energy = 0.5 * s.dot(e);
    return out;
  }

  if (!(lambda3 > 0.0) || !std::isfinite(lambda3)) throw ConstitutiveError("thickness stretch must be positive");
  const double detC = C.determinant();
  if (!(detC > 0.0) || !(C(0, 0) > 0.0)) throw ConstitutiveError("in-plane metric is not positive definite");
  const Mat2 Ci = C.inverse();
  const double C33 = lambda3 * lambda3;
  const double A = (G.cwiseProduct(C)).sum();
  const Mat2 GCG = G * C * G;
  const double A2 = (GCG.cwiseProduct(C)).sum();
  const double I1 = A + C33;
  const double I2 = 0.5 * (A * A - A2) + A * C33;
  const double c1 = p.c1, c2 = p.c2;

  const Mat2 W_ab = c1 * G + c2 * (I1 * G - GCG);
  const double W_33 = c1 + c2 * A;
  out.p_tilde = 2.0 * C33 * W_33;
  out.S = 2.0 * W_ab - out.p_tilde * Ci;
  out.s33 = 2.0 * W_33 - out.p_tilde / C33;
  out.energy = c1 * (I1 - 3.0) + c2 * (I2 - 3.0);

  // d2W/dCab dCcd and d2W/dCab dC33; d2W/dC33^2 vanishes. The transverse stretch follows
  // C33 = det(G_cov)/det(C), so dC33/dCcd = -C33 C^cd.
  auto W_abcd = [&](int a, int b, int c, int d) {
    return c2 * (G(c, d) * G(a, b) - 0.5 * (G(a, c) * G(b, d) + G(a, d) * G(b, c)));
  };
  auto W_ab33 = [&](int a, int b) { return c2 * G(a, b); };
  for (int I = 0; I < 3; ++I)
    for (int Jv = 0; Jv < 3; ++Jv) {
      const int a = kVoigt[I][0], b = kVoigt[I][1], c = kVoigt[Jv][0], d = kVoigt[Jv][1];
      out.tangent(I, Jv) = 4.0 * W_abcd(a, b, c, d) - 4.0 * C33 * W_ab33(a, b) * Ci(c, d) -
                           4.0 * C33 * W_ab33(c, d) * Ci(a, b) + 2.0 * out.p_tilde * Ci(a, b) * Ci(c, d) +
                           out.p_tilde * (Ci(a, c) * Ci(b, d) + Ci(a, d) * Ci(b, c));
    }
  return out;
}

}  // namespace shellpath
