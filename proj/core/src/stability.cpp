#include "shellpath/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

namespace shellpath {

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::LimitLike: return "limit";
    case StabilityClass::BifurcationLike: return "bifurcation";
  }
  return "?";
}

namespace {

void fix_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index i;
    V.col(j).cwiseAbs().maxCoeff(&i);
    if (V(i, j) < 0.0) V.col(j) = -V.col(j);
  }
}

// S = (I - U U^T)^(-1/2) = I + B diag(c) B^T and its inverse I + B diag(d) B^T; identity without a gauge.
struct Metric {
  Eigen::MatrixXd B;
  Eigen::VectorXd c, d;

  bool identity() const { return B.cols() == 0; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) const {
    if (identity()) return X;
    return X + B * (w.asDiagonal() * (B.transpose() * X));
  }
  Eigen::MatrixXd S(const Eigen::MatrixXd& X) const { return apply(X, c); }
  Eigen::MatrixXd S_inv(const Eigen::MatrixXd& X) const { return apply(X, d); }
};

bool make_metric(const Eigen::MatrixXd& gauge, Metric& met, std::string& diag) {
  if (gauge.cols() == 0) return true;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gauge, Eigen::ComputeThinU);
  const Eigen::VectorXd s2 = svd.singularValues().cwiseAbs2();
  if (s2.maxCoeff() >= 1.0 - 1e-12) {
    diag = "gauge includes a rigid motion that the constraints do not remove";
    return false;
  }
  met.B = svd.matrixU();
  met.c = (1.0 - s2.array()).rsqrt() - 1.0;
  met.d = (1.0 - s2.array()).sqrt() - 1.0;
  return true;
}

bool dense_pairs(const Eigen::SparseMatrix<double>& Ks, const Metric& met, int m, Eigen::VectorXd& vals,
                 Eigen::MatrixXd& vecs, std::string& diag) {
  Eigen::MatrixXd D(Ks);
  if (!met.identity()) {
    const Eigen::MatrixXd SD = met.S(D);
    D = met.S(SD.transpose());
    D = 0.5 * (D + D.transpose()).eval();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  if (es.info() != Eigen::Success) {
    diag = "dense eigensolver failed";
    return false;
  }
  vals = es.eigenvalues().head(m);
  vecs = es.eigenvectors().leftCols(m);
  return true;
}

/// Block inverse iteration with Rayleigh-Ritz; finds the eigenvalues closest to zero.
bool inverse_pairs(const Eigen::SparseMatrix<double>& Ks, const Metric& met, int m, int max_iter, double tol, Eigen::VectorXd& vals,
                   Eigen::MatrixXd& vecs, std::string& diag) {
  const Eigen::Index n = Ks.rows();
  const int p = std::min<int>(static_cast<int>(n), std::max(2 * m, m + 4));
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Ks);
  if (lu.info() != Eigen::Success) {
    diag = "factorization for inverse iteration failed";
    return false;
  }
  std::mt19937 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = nd(rng);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd Y = met.S_inv(lu.solve(met.S_inv(X)));
    if (!Y.allFinite()) {
      diag = "inverse iteration produced non-finite vectors";
      return false;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    const Eigen::MatrixXd KQ = met.S(Ks * met.S(Q));
    const Eigen::MatrixXd H = Q.transpose() * KQ;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    // order Ritz pairs by distance from zero, then report the m kept ones ascending
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(es.eigenvalues()[a]) < std::abs(es.eigenvalues()[b]); });
    Eigen::MatrixXd V(p, p);
    Eigen::VectorXd L(p);
    for (int i = 0; i < p; ++i) {
      V.col(i) = es.eigenvectors().col(idx[i]);
      L[i] = es.eigenvalues()[idx[i]];
    }
    X = Q * V;
    const Eigen::MatrixXd R = KQ * V.leftCols(m) - X.leftCols(m) * L.head(m).asDiagonal();
    if (R.colwise().norm().maxCoeff() <= tol) {
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return L[a] < L[b]; });
      vals.resize(m);
      vecs.resize(n, m);
      for (int i = 0; i < m; ++i) {
        vals[i] = L[order[i]];
        vecs.col(i) = X.col(order[i]);
      }
      return true;
    }
  }
  diag = "inverse iteration did not converge in " + std::to_string(max_iter) + " iterations";
  return false;
}

}  // namespace

StabilityReport stability_check(const Eigen::SparseMatrix<double>& K, const StabilitySettings& settings,
                                const Eigen::VectorXd& load, const Eigen::MatrixXd& gauge) {
  StabilityReport rep;
  const Eigen::Index n = K.rows();
  if (n == 0) return rep;
  const int m = std::max(1, std::min<int>(settings.modes, static_cast<int>(n)));
  Eigen::SparseMatrix<double> Kt = K.transpose();
  Eigen::SparseMatrix<double> Ks = 0.5 * (K + Kt);
  Ks.makeCompressed();
  const double scale = Ks.diagonal().cwiseAbs().mean();
  rep.threshold = settings.zero_tol * Ks.diagonal().mean();

  Metric met;
  bool ok = gauge.cols() == 0 || gauge.rows() == n;
  if (!ok) rep.diagnostics = "gauge has " + std::to_string(gauge.rows()) + " rows, expected " + std::to_string(n);
  ok = ok && make_metric(gauge, met, rep.diagnostics);
  if (ok && n <= settings.dense_limit)
    ok = dense_pairs(Ks, met, m, rep.eigenvalues, rep.eigenvectors, rep.diagnostics);
  else if (ok)
    ok = inverse_pairs(Ks, met, m, settings.max_iter, 1e-10 * scale, rep.eigenvalues, rep.eigenvectors,
                       rep.diagnostics);
  if (!ok) {
    rep.ok = false;
    rep.eigenvalues.resize(0);
    rep.eigenvectors.resize(n, 0);
    return rep;
  }
  rep.zero_crossing = rep.eigenvalues[0] <= rep.threshold;
  rep.alignments = Eigen::VectorXd::Zero(rep.eigenvalues.size());
  if (load.size() == n && load.norm() > 0.0) {
    const Eigen::VectorXd g = met.S(load);
    rep.alignments = (rep.eigenvectors.transpose() * g).cwiseAbs() / g.norm();
  }
  if (!met.identity()) {
    rep.eigenvectors = met.S(rep.eigenvectors);
    rep.eigenvectors.colwise().normalize();
  }
  fix_signs(rep.eigenvectors);
  rep.load_alignment = rep.alignments[0];
  for (Eigen::Index e = 0; e < rep.eigenvalues.size(); ++e)
    if (rep.eigenvalues[e] <= rep.threshold) {
      ++rep.negative;
      if (rep.alignments[e] <= settings.alignment_tol) ++rep.negative_orthogonal;
    }
  if (rep.zero_crossing)
    rep.classification = rep.load_alignment > settings.alignment_tol ? StabilityClass::LimitLike
                                                                      : StabilityClass::BifurcationLike;
  return rep;
}

}  // namespace shellpath
