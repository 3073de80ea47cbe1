#include "shellpath/variations.hpp"

namespace shellpath {

namespace {

/// (e_i x e_j) . v
inline double triple(int i, int j, const Vec3& v) {
  if (i == j) return 0.0;
  const int k = 3 - i - j;
  return ((j - i + 3) % 3 == 1) ? v[k] : -v[k];
}

}  // namespace

VariationSet::VariationSet(const PatchBasis& basis, const ReferenceFrame& ref, const DeformedFrame& def,
                           ThicknessModel model)
    : ndof_(3 * static_cast<int>(basis.N.size())),
      basis_(&basis),
      def_(&def),
      Jref_(ref.J),
      incompressible_(model == ThicknessModel::Incompressible) {
  eps.resize(3, ndof_);
  kappa.resize(3, ndof_);
  a3_tilde.resize(3, ndof_);
  a3.resize(3, ndof_);
  J.resize(ndof_);
  lambda3.resize(ndof_);
  beta.resize(3, ndof_);
  const Vec3 &a1 = def.a[0], &a2 = def.a[1], &n = def.a3;
  const double Jd = def.J, l3 = def.lambda3;
  const double dl3_dJ = incompressible_ ? -Jref_ / (Jd * Jd) : 0.0;
  const Eigen::Vector3d beta0(def.beta(0, 0), def.beta(1, 1), def.beta(0, 1));
  for (int a = 0; a < static_cast<int>(basis.N.size()); ++a) {
    const double N1 = basis.dN(a, 0), N2 = basis.dN(a, 1);
    const double N11 = basis.d2N(a, 0), N12 = basis.d2N(a, 1), N22 = basis.d2N(a, 2);
    const Vec3 w = N1 * a2 - N2 * a1;
    for (int i = 0; i < 3; ++i) {
      const int r = 3 * a + i;
      const Vec3 ei = Vec3::Unit(i);
      const Vec3 dt = ei.cross(w);
      const double dJ = n.dot(dt);
      const Vec3 dn = (dt - dJ * n) / Jd;
      a3_tilde.col(r) = dt;
      J[r] = dJ;
      a3.col(r) = dn;
      lambda3[r] = dl3_dJ * dJ;
      eps.col(r) << N1 * a1[i], N2 * a2[i], N1 * a2[i] + N2 * a1[i];
      beta.col(r) << N11 * n[i] + def.a_d[0].dot(dn), N22 * n[i] + def.a_d[2].dot(dn), N12 * n[i] + def.a_d[1].dot(dn);
      const Eigen::Vector3d db = lambda3[r] * beta0 + l3 * beta.col(r);
      kappa.col(r) << -db[0], -db[1], -2.0 * db[2];
    }
  }
}

SecondVariation VariationSet::second(int r, int s) const {
  const PatchBasis& B = *basis_;
  const DeformedFrame& d = *def_;
  const int a = r / 3, i = r % 3, b = s / 3, j = s % 3;
  const double Jd = d.J;
  SecondVariation out;
  const double cab = B.dN(a, 0) * B.dN(b, 1) - B.dN(b, 0) * B.dN(a, 1);
  if (i != j) out.a3_tilde = cab * Vec3::Unit(i).cross(Vec3::Unit(j));
  out.J = (out.a3_tilde.dot(d.a3_tilde) + a3_tilde.col(r).dot(a3_tilde.col(s)) - J[r] * J[s]) / Jd;
  out.a3 = out.a3_tilde / Jd - (J[r] * a3_tilde.col(s) + J[s] * a3_tilde.col(r)) / (Jd * Jd) -
           out.J * d.a3_tilde / (Jd * Jd) + 2.0 * J[r] * J[s] * d.a3_tilde / (Jd * Jd * Jd);
  out.lambda3 = incompressible_ ? Jref_ * (2.0 * J[r] * J[s] / (Jd * Jd * Jd) - out.J / (Jd * Jd)) : 0.0;
  if (i == j)
    out.eps << B.dN(a, 0) * B.dN(b, 0), B.dN(a, 1) * B.dN(b, 1), B.dN(a, 0) * B.dN(b, 1) + B.dN(a, 1) * B.dN(b, 0);
  static constexpr int kD2[3] = {0, 2, 1};
  Eigen::Vector3d ddb;
  const Eigen::Vector3d beta0(d.beta(0, 0), d.beta(1, 1), d.beta(0, 1));
  for (int c = 0; c < 3; ++c) {
    const double ddbeta = B.d2N(a, kD2[c]) * a3(i, s) +
                          B.d2N(b, kD2[c]) * a3(j, r) + d.a_d[kD2[c]].dot(out.a3);
    ddb[c] = out.lambda3 * beta0[c] + lambda3[r] * beta(c, s) + lambda3[s] * beta(c, r) + d.lambda3 * ddbeta;
  }
  out.kappa << -ddb[0], -ddb[1], -2.0 * ddb[2];
  return out;
}

void VariationSet::add_geometric_stiffness(const Eigen::Vector3d& n, const Eigen::Vector3d& m, double weight,
                                           Eigen::MatrixXd& K) const {
  const PatchBasis& B = *basis_;
  const DeformedFrame& d = *def_;
  const int nb = static_cast<int>(B.N.size());
  const double Jd = d.J, J2 = Jd * Jd, J3 = J2 * Jd, l3 = d.lambda3;
  const Eigen::Vector3d mh(m[0], m[1], 2.0 * m[2]);
  const Eigen::Vector3d beta0(d.beta(0, 0), d.beta(1, 1), d.beta(0, 1));
  const double m_beta = mh.dot(beta0);
  const Vec3 v = mh[0] * d.a_d[0] + mh[1] * d.a_d[2] + mh[2] * d.a_d[1];
  const double v_t = v.dot(d.a3_tilde);

  Eigen::VectorXd Ma(nb), v_dt(ndof_), m_dbeta(ndof_);
  for (int a = 0; a < nb; ++a) Ma[a] = mh[0] * B.d2N(a, 0) + mh[1] * B.d2N(a, 2) + mh[2] * B.d2N(a, 1);
  for (int r = 0; r < ndof_; ++r) {
    v_dt[r] = v.dot(a3_tilde.col(r));
    m_dbeta[r] = mh.dot(beta.col(r));
  }
  const Eigen::MatrixXd dtdt = a3_tilde.transpose() * a3_tilde;

  for (int a = 0; a < nb; ++a) {
    const double Na1 = B.dN(a, 0), Na2 = B.dN(a, 1);
    for (int b = 0; b < nb; ++b) {
      const double Nb1 = B.dN(b, 0), Nb2 = B.dN(b, 1);
      const double cab = Na1 * Nb2 - Nb1 * Na2;
      const double membrane = weight * (n[0] * Na1 * Nb1 + n[1] * Na2 * Nb2 + n[2] * (Na1 * Nb2 + Na2 * Nb1));
      for (int i = 0; i < 3; ++i) {
        const int r = 3 * a + i;
        for (int j = 0; j < 3; ++j) {
          const int s = 3 * b + j;
          const double ddJ = (cab * triple(i, j, d.a3_tilde) + dtdt(r, s) - J[r] * J[s]) / Jd;
          const double v_dda3 = cab * triple(i, j, v) / Jd - ddJ * v_t / J2 - (J[r] * v_dt[s] + J[s] * v_dt[r]) / J2 +
                                2.0 * J[r] * J[s] * v_t / J3;
          const double ddl3 = incompressible_ ? Jref_ * (2.0 * J[r] * J[s] / J3 - ddJ / J2) : 0.0;
          const double m_ddb = ddl3 * m_beta + lambda3[r] * m_dbeta[s] + lambda3[s] * m_dbeta[r] +
                               l3 * (Ma[a] * a3(i, s) + Ma[b] * a3(j, r) + v_dda3);
          K(r, s) += (i == j ? membrane : 0.0) - weight * m_ddb;
        }
      }
    }
  }
}

}  // namespace shellpath
