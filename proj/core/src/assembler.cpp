#include "shellpath/assembler.hpp"

#include <algorithm>
#include <exception>

#include <Eigen/QR>

#include "shellpath/resultants.hpp"
#include "shellpath/variations.hpp"

namespace shellpath {

void element_contribution(const Discretization& disc, int e, const Eigen::MatrixXd& U, ElementContribution& out,
                          bool need_tangent) {
  const Element& el = disc.element(e);
  const int nb = static_cast<int>(el.stencil.control.size());
  const int nd = 3 * nb;
  const MaterialParams& mat = disc.settings().material;
  const ThicknessModel model = mat.thickness_model();
  out.internal_force.setZero(nd);
  out.pressure_force.setZero(nd);
  out.energy = 0.0;
  if (need_tangent) {
    out.stiffness.setZero(nd, nd);
    out.pressure_stiffness.setZero(nd, nd);
  }
  for (const QuadratureData& q : el.points) {
    SurfaceDerivatives cur = q.reference;
    for (int a = 0; a < nb; ++a) {
      const Vec3 d = U.row(a).transpose();
      cur.x += q.basis.N[a] * d;
      cur.d1[0] += q.basis.dN(a, 0) * d;
      cur.d1[1] += q.basis.dN(a, 1) * d;
      cur.d2[0] += q.basis.d2N(a, 0) * d;
      cur.d2[1] += q.basis.d2N(a, 1) * d;
      cur.d2[2] += q.basis.d2N(a, 2) * d;
    }
    DeformedFrame def;
    try {
      def = deformed_frame(q.frame, cur, model);
    } catch (const GeometryError& err) {
      throw GeometryError("face " + std::to_string(e) + ": " + err.what());
    }
    const StrainState strain = strain_state(q.frame, def);
    const StressResultants res = stress_resultants(mat, q.frame, strain);
    const VariationSet var(q.basis, q.frame, def, model);
    const double w = q.weight * q.frame.J;

    out.internal_force.noalias() += w * (var.eps.transpose() * res.n + var.kappa.transpose() * res.m);
    out.energy += w * res.energy;
    for (int a = 0; a < nb; ++a) out.pressure_force.segment<3>(3 * a) += (q.weight * q.basis.N[a]) * def.a3_tilde;

    if (!need_tangent) continue;
    const Eigen::Matrix<double, 3, Eigen::Dynamic> Sn = res.Dnn * var.eps + res.Dnm * var.kappa;
    const Eigen::Matrix<double, 3, Eigen::Dynamic> Sm = res.Dnm.transpose() * var.eps + res.Dmm * var.kappa;
    out.stiffness.noalias() += w * (var.eps.transpose() * Sn + var.kappa.transpose() * Sm);
    var.add_geometric_stiffness(res.n, res.m, w, out.stiffness);
    for (int a = 0; a < nb; ++a) {
      const double wn = q.weight * q.basis.N[a];
      out.pressure_stiffness.middleRows<3>(3 * a) += wn * var.a3_tilde;
    }
  }
}

Assembler::Assembler(const Discretization& disc) : disc_(&disc) {
  const int n = disc.num_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < disc.num_elements(); ++e) {
    const std::vector<int>& c = disc.element(e).stencil.control;
    for (int b : c)
      for (int j = 0; j < 3; ++j)
        for (int a : c)
          for (int i = 0; i < 3; ++i) trip.emplace_back(3 * a + i, 3 * b + j, 0.0);
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();
  slots_.resize(disc.num_elements());
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (int e = 0; e < disc.num_elements(); ++e) {
    const std::vector<int>& c = disc.element(e).stencil.control;
    const int nd = 3 * static_cast<int>(c.size());
    std::vector<int>& sl = slots_[e];
    sl.resize(static_cast<std::size_t>(nd) * nd);
    for (int s = 0; s < nd; ++s) {
      const int col = 3 * c[s / 3] + s % 3;
      for (int r = 0; r < nd; ++r) {
        const int row = 3 * c[r / 3] + r % 3;
        const int* pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
        sl[static_cast<std::size_t>(s) * nd + r] = static_cast<int>(pos - inner);
      }
    }
  }
}

void Assembler::assemble(const Eigen::VectorXd& u, double pressure, AssembledSystem& out, bool need_tangent) const {
  const Discretization& disc = *disc_;
  const int ne = disc.num_elements();
  std::vector<ElementContribution> contrib(ne);
  std::exception_ptr failure;
#ifdef SHELLPATH_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (int e = 0; e < ne; ++e) {
    try {
      element_contribution(disc, e, disc.gather(e, u), contrib[e], need_tangent);
    } catch (...) {
#ifdef SHELLPATH_HAVE_OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.internal_force.setZero(disc.num_dofs());
  out.pressure_force.setZero(disc.num_dofs());
  out.energy = 0.0;
  if (need_tangent) {
    out.tangent = pattern_;
    std::fill(out.tangent.valuePtr(), out.tangent.valuePtr() + out.tangent.nonZeros(), 0.0);
  }
  double* val = need_tangent ? out.tangent.valuePtr() : nullptr;
  for (int e = 0; e < ne; ++e) {
    const std::vector<int>& c = disc.element(e).stencil.control;
    const ElementContribution& ec = contrib[e];
    const int nd = 3 * static_cast<int>(c.size());
    for (int r = 0; r < nd; ++r) {
      const int g = 3 * c[r / 3] + r % 3;
      out.internal_force[g] += ec.internal_force[r];
      out.pressure_force[g] += ec.pressure_force[r];
    }
    out.energy += ec.energy;
    if (!need_tangent) continue;
    const std::vector<int>& sl = slots_[e];
    for (int s = 0; s < nd; ++s)
      for (int r = 0; r < nd; ++r)
        val[sl[static_cast<std::size_t>(s) * nd + r]] += ec.stiffness(r, s) - pressure * ec.pressure_stiffness(r, s);
  }
}

Eigen::MatrixXd rigid_motions(const ControlMesh& mesh, const Eigen::VectorXd& displacement) {
  const int n = mesh.num_vertices();
  Eigen::MatrixXd x(3, n);
  for (int v = 0; v < n; ++v) x.col(v) = mesh.vertex(v) + displacement.segment<3>(3 * v);
  const Vec3 c = x.rowwise().mean();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3 * n, 6);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < 3; ++i) {
      R(3 * v + i, i) = 1.0;
      R.block<3, 1>(3 * v, 3 + i) = Vec3::Unit(i).cross(Vec3(x.col(v) - c));
    }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
  return qr.householderQ() * Eigen::MatrixXd::Identity(3 * n, 6);
}

ShellProblem::ShellProblem(const Discretization& disc, DofMap dofs, double reference_pressure)
    : assembler_(disc), dofs_(std::move(dofs)), p_ref_(reference_pressure) {
  if (dofs_.num_dofs() != disc.num_dofs()) throw Error("DOF map does not match the discretization");
  const Eigen::SparseMatrix<double>& P = assembler_.pattern();
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < P.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(P, col); it; ++it) {
      const int fr = dofs_.free_index(static_cast<int>(it.row())), fc = dofs_.free_index(col);
      if (fr >= 0 && fc >= 0) trip.emplace_back(fr, fc, 0.0);
    }
  reduced_pattern_.resize(dofs_.num_free(), dofs_.num_free());
  reduced_pattern_.setFromTriplets(trip.begin(), trip.end());
  reduced_pattern_.makeCompressed();
  reduced_slot_.assign(P.nonZeros(), -1);
  const int* outer = reduced_pattern_.outerIndexPtr();
  const int* inner = reduced_pattern_.innerIndexPtr();
  for (int col = 0; col < P.outerSize(); ++col)
    for (int k = P.outerIndexPtr()[col]; k < P.outerIndexPtr()[col + 1]; ++k) {
      const int fr = dofs_.free_index(P.innerIndexPtr()[k]), fc = dofs_.free_index(col);
      if (fr < 0 || fc < 0) continue;
      reduced_slot_[k] = static_cast<int>(std::lower_bound(inner + outer[fc], inner + outer[fc + 1], fr) - inner);
    }
}

void ShellProblem::linearize(const Eigen::VectorXd& u, double kappa, Linearization& out, bool need_tangent) {
  const Eigen::VectorXd full = dofs_.expand(u);
  const double pressure = kappa * p_ref_;
  assembler_.assemble(full, pressure, full_, need_tangent);
  ++count_;
  out.load = p_ref_ * dofs_.restrict_to_free(full_.pressure_force);
  out.residual = dofs_.restrict_to_free(full_.internal_force) - kappa * out.load;
  out.gauge.resize(0, 0);
  if (!need_tangent) return;
  if (rigid_metric_) {
    const Eigen::MatrixXd Q = rigid_motions(discretization().mesh(), full);
    out.gauge.resize(dofs_.num_free(), Q.cols());
    for (int i = 0; i < dofs_.num_free(); ++i) out.gauge.row(i) = Q.row(dofs_.free_dofs()[i]);
  }
  out.tangent = reduced_pattern_;
  double* dst = out.tangent.valuePtr();
  std::fill(dst, dst + out.tangent.nonZeros(), 0.0);
  const double* src = full_.tangent.valuePtr();
  for (std::size_t k = 0; k < reduced_slot_.size(); ++k)
    if (reduced_slot_[k] >= 0) dst[reduced_slot_[k]] += src[k];
}

}  // namespace shellpath
