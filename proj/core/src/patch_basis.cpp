#include "shellpath/patch_basis.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "shellpath/bspline.hpp"
#include "shellpath/subdivision.hpp"

namespace shellpath {

namespace {

using Mat2 = Eigen::Matrix2d;
using Grad = Eigen::Matrix<double, Eigen::Dynamic, 2>;
using Hess = Eigen::Matrix<double, Eigen::Dynamic, 3>;

constexpr double kCorner[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

/// Columns are the unit directions from corner k to corner k+1 and corner k-1.
Mat2 corner_frame(int k) {
  const int kn = (k + 1) & 3, kp = (k + 3) & 3;
  Mat2 m;
  m << kCorner[kn][0] - kCorner[k][0], kCorner[kp][0] - kCorner[k][0],
       kCorner[kn][1] - kCorner[k][1], kCorner[kp][1] - kCorner[k][1];
  return m;
}

/// Transforms derivatives from coordinates (s,t) to x = c + scale*M*(s,t), M orthogonal.
void push_derivatives(const Mat2& M, double scale, Grad& dN, Hess& d2N) {
  const double g = 1.0 / scale, h = g * g;
  for (Eigen::Index a = 0; a < dN.rows(); ++a) {
    const Eigen::Vector2d d = M * Eigen::Vector2d(dN(a, 0), dN(a, 1));
    Mat2 H;
    H << d2N(a, 0), d2N(a, 1), d2N(a, 1), d2N(a, 2);
    const Mat2 Hx = M * H * M.transpose();
    dN(a, 0) = g * d[0];
    dN(a, 1) = g * d[1];
    d2N(a, 0) = h * Hx(0, 0);
    d2N(a, 1) = h * Hx(0, 1);
    d2N(a, 2) = h * Hx(1, 1);
  }
}

/// Local one-ring mesh of a valence-n patch in slot ordering, refined once.
struct IrregularTemplate {
  /// child_maps[k][m] = P_k * A^m maps the slots to the 16 points of regular child k at level m.
  std::array<std::vector<Eigen::MatrixXd>, 4> child_maps;
};

ControlMesh template_mesh(int n) {
  const int o = 2 * n + 1;
  std::vector<Quad> faces;
  for (int j = 0; j < n; ++j) faces.push_back({0, 2 * j + 1, 2 * j + 2, 2 * ((j + 1) % n) + 1});
  faces.push_back({2 * n, o + 0, o + 1, 1});
  faces.push_back({1, o + 1, o + 2, 2});
  faces.push_back({2, o + 2, o + 3, o + 4});
  faces.push_back({3, 2, o + 4, o + 5});
  faces.push_back({4, 3, o + 5, o + 6});
  return ControlMesh(std::vector<Vec3>(2 * n + 8, Vec3::Zero()), std::move(faces));
}

std::unique_ptr<IrregularTemplate> build_template(int n) {
  const ControlMesh coarse = template_mesh(n);
  const SubdivisionStep step = subdivision_step(coarse);
  const ControlMesh fine(std::vector<Vec3>(step.matrix.rows(), Vec3::Zero()), step.faces);
  const Eigen::MatrixXd S(step.matrix);

  auto rows = [&](const PatchStencil& st) {
    Eigen::MatrixXd out(st.num_slots(), S.cols());
    for (int s = 0; s < st.num_slots(); ++s) out.row(s) = S.row(st.control[s]);
    return out;
  };
  const PatchStencil inner = ring_patch_stencil(fine, 0, 0);
  if (inner.valence != n || inner.boundary)
    throw MeshError("irregular template construction failed for valence " + std::to_string(n));
  const Eigen::MatrixXd A = rows(inner);

  auto tpl = std::make_unique<IrregularTemplate>();
  for (int k = 1; k < 4; ++k) {
    const PatchStencil child = patch_stencil(fine, k);
    if (child.kind != PatchKind::Regular || child.boundary)
      throw MeshError("irregular template construction failed for valence " + std::to_string(n));
    Eigen::MatrixXd M = rows(child);
    tpl->child_maps[k].reserve(kMaxIrregularDepth + 1);
    for (int m = 0; m <= kMaxIrregularDepth; ++m) {
      tpl->child_maps[k].push_back(M);
      M = M * A;
    }
  }
  return tpl;
}

const IrregularTemplate& irregular_template(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<IrregularTemplate>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = build_template(n);
  return *slot;
}

}  // namespace

void regular_slot_basis(double u, double v, Eigen::VectorXd& N, Grad& dN, Hess& d2N) {
  const BsplineRow bu = cubic_bspline_row(u), bv = cubic_bspline_row(v);
  N.resize(16);
  dN.resize(16, 2);
  d2N.resize(16, 3);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const int a = i + 4 * j;
      N[a] = bu.value[i] * bv.value[j];
      dN(a, 0) = bu.first[i] * bv.value[j];
      dN(a, 1) = bu.value[i] * bv.first[j];
      d2N(a, 0) = bu.second[i] * bv.value[j];
      d2N(a, 1) = bu.first[i] * bv.first[j];
      d2N(a, 2) = bu.value[i] * bv.second[j];
    }
}

bool irregular_slot_basis(int n, double u, double v, Eigen::VectorXd& N, Grad& dN, Hess& d2N) {
  if (n < 3) throw MeshError("extraordinary vertex of valence " + std::to_string(n) + " is not supported");
  const IrregularTemplate& tpl = irregular_template(n);
  const double u0 = u, v0 = v;
  bool reliable = true;
  int m = 0;
  while (std::max(u, v) < 0.5 && m < kMaxIrregularDepth) {
    u *= 2.0;
    v *= 2.0;
    ++m;
  }
  if (std::max(u, v) < 0.5) {
    reliable = false;
    const double mx = std::max(u, v);
    if (mx <= 0.0) {
      u = 0.5;
      v = 0.0;
    } else {
      u *= 0.5 / mx;
      v *= 0.5 / mx;
    }
  }
  const int k = (v < 0.5) ? 1 : (u >= 0.5 ? 2 : 3);
  const Mat2 M = corner_frame(k);
  const Eigen::Vector2d st = 2.0 * M.transpose() * (Eigen::Vector2d(u, v) - Eigen::Vector2d(kCorner[k][0], kCorner[k][1]));

  Eigen::VectorXd b;
  Grad db;
  Hess d2b;
  regular_slot_basis(std::clamp(st[0], 0.0, 1.0), std::clamp(st[1], 0.0, 1.0), b, db, d2b);
  push_derivatives(M, 0.5 / std::ldexp(1.0, m), db, d2b);

  const Eigen::MatrixXd& P = tpl.child_maps[k][m];
  N = P.transpose() * b;
  dN = P.transpose() * db;
  d2N = P.transpose() * d2b;
  if (u0 == 0.0 && v0 == 0.0) {
    // exact limit position mask at the extraordinary vertex
    const double w = 1.0 / (n * (n + 5.0));
    N.setZero();
    N[0] = n * n * w;
    for (int j = 0; j < n; ++j) {
      N[2 * j + 1] = 4.0 * w;
      N[2 * j + 2] = w;
    }
  }
  return reliable;
}

PatchBasis evaluate_patch_basis(const PatchStencil& stencil, double theta1, double theta2) {
  PatchBasis out;
  out.theta1 = theta1;
  out.theta2 = theta2;
  Eigen::VectorXd N;
  Grad dN;
  Hess d2N;
  if (stencil.kind == PatchKind::Regular) {
    regular_slot_basis(theta1, theta2, N, dN, d2N);
  } else {
    const int r = stencil.rotation;
    const Mat2 M = corner_frame(r);
    const Eigen::Vector2d uv = M.transpose() * (Eigen::Vector2d(theta1, theta2) - Eigen::Vector2d(kCorner[r][0], kCorner[r][1]));
    out.second_derivatives_reliable = irregular_slot_basis(stencil.valence, uv[0], uv[1], N, dN, d2N);
    push_derivatives(M, 1.0, dN, d2N);
  }
  out.N = stencil.expansion.transpose() * N;
  out.dN = stencil.expansion.transpose() * dN;
  out.d2N = stencil.expansion.transpose() * d2N;
  return out;
}

void gauss_legendre(int points, std::vector<double>& x, std::vector<double>& w) {
  if (points < 1) throw Error("Gauss rule needs at least one point");
  x.assign(points, 0.0);
  w.assign(points, 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < points; ++i) {
    double z = std::cos(pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= points; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (points == 1) p0 = 1.0;
      dp = points * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[points - 1 - i] = z;
    w[points - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<QuadraturePoint> gauss_rule_2d(int points) {
  std::vector<double> x, w;
  gauss_legendre(points, x, w);
  std::vector<QuadraturePoint> rule;
  for (int j = 0; j < points; ++j)
    for (int i = 0; i < points; ++i)
      rule.push_back({0.5 * (x[i] + 1.0), 0.5 * (x[j] + 1.0), 0.25 * w[i] * w[j]});
  return rule;
}

}  // namespace shellpath
