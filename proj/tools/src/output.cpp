#include "app/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "shellpath/error.hpp"
#include "shellpath/frames.hpp"
#include "shellpath/patch_basis.hpp"
#include "shellpath/resultants.hpp"

namespace shellpath::app {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(std::string("snapshot has a non-finite ") + what);
}

}  // namespace

std::string history_header(int modes) {
  std::string h = "step,branch,kappa,pressure,volume,max_disp";
  for (int e = 1; e <= modes; ++e) h += ",eig" + std::to_string(e);
  return h + ",newton_iters";
}

HistoryRow history_row(const StepRecord& r, int modes) {
  HistoryRow row{r.step, r.branch, r.kappa, r.pressure, r.measures.volume, r.measures.max_disp, {}, r.newton_iters};
  row.eigenvalues.assign(modes, std::numeric_limits<double>::quiet_NaN());
  for (int e = 0; e < modes && e < r.eigenvalues.size(); ++e) row.eigenvalues[e] = r.eigenvalues[e];
  return row;
}

std::string format_row(const HistoryRow& row) {
  std::string s = std::to_string(row.step) + "," + std::to_string(row.branch) + "," + num(row.kappa) + "," +
                  num(row.pressure) + "," + num(row.volume) + "," + num(row.max_disp);
  for (double e : row.eigenvalues) s += "," + num(e);
  return s + "," + std::to_string(row.newton_iters);
}

HistoryWriter::HistoryWriter(const std::string& path, int modes) : out_(path), modes_(modes) {
  if (!out_) throw Error("cannot write " + path);
  out_ << kHistoryVersion << '\n' << history_header(modes) << '\n' << std::flush;
}

void HistoryWriter::append(const StepRecord& r) {
  out_ << format_row(history_row(r, modes_)) << '\n' << std::flush;
  ++rows_;
}

History read_history(std::istream& in, const std::string& source) {
  auto fail = [&](int line, const std::string& msg) -> Error {
    return Error(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  if (!std::getline(in, line) || line != kHistoryVersion)
    throw fail(1, "expected '" + std::string(kHistoryVersion) + "'");
  if (!std::getline(in, line)) throw fail(2, "missing column header");
  History h;
  const std::vector<std::string> cols = split(line);
  h.modes = static_cast<int>(cols.size()) - 7;
  if (h.modes < 0 || line != history_header(h.modes)) throw fail(2, "unexpected columns '" + line + "'");
  const std::size_t width = cols.size();
  for (int ln = 3; std::getline(in, line); ++ln) {
    const std::vector<std::string> f = split(line);
    if (f.size() != width)
      throw fail(ln, "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    auto integer = [&](std::size_t i) {
      char* end = nullptr;
      const long v = std::strtol(f[i].c_str(), &end, 10);
      if (f[i].empty() || *end) throw fail(ln, "column '" + cols[i] + "' is not an integer");
      return static_cast<int>(v);
    };
    auto real = [&](std::size_t i) {
      char* end = nullptr;
      const double v = std::strtod(f[i].c_str(), &end);
      if (f[i].empty() || *end) throw fail(ln, "column '" + cols[i] + "' is not a number");
      return v;
    };
    HistoryRow r{integer(0), integer(1), real(2), real(3), real(4), real(5), {}, integer(width - 1)};
    for (int e = 0; e < h.modes; ++e) r.eigenvalues.push_back(real(6 + e));
    h.rows.push_back(std::move(r));
  }
  return h;
}

History read_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_history(in, path);
}

SurfaceSample sample_surface(const Discretization& disc, const Eigen::VectorXd& u, int resolution) {
  if (resolution < 1) throw Error("sample resolution must be positive");
  if (u.size() != disc.num_dofs()) throw Error("displacement does not match the discretization");
  const MaterialParams& mat = disc.settings().material;
  const int n = resolution;
  SurfaceSample s;
  for (int e = 0; e < disc.num_elements(); ++e) {
    const int base = static_cast<int>(s.points.size());
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const SurfacePoint p{e, static_cast<double>(i) / n, static_cast<double>(j) / n};
        const SurfaceDerivatives ref = disc.evaluate(p, {});
        const SurfaceDerivatives cur = disc.evaluate(p, u);
        const Vec3 d = cur.x - ref.x;
        s.points.push_back(cur.x);
        s.disp_norm.push_back(d.norm());
        s.disp_z.push_back(d.z());
      }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int a = base + i + (n + 1) * j;
        s.cells.push_back({a, a + 1, a + n + 2, a + n + 1});
        const SurfacePoint p{e, (i + 0.5) / n, (j + 0.5) / n};
        const ReferenceFrame rf =
            reference_frame(disc.evaluate(p, {}), disc.settings().thickness, disc.settings().thickness_points);
        const DeformedFrame df = deformed_frame(rf, disc.evaluate(p, u), mat.thickness_model());
        const StrainState st = strain_state(rf, df);
        const StressResultants res = stress_resultants(mat, rf, st);
        s.energy_density.push_back(res.n.dot(to_voigt_strain(st.eps)));
      }
  }
  return s;
}

void write_surface_vtk(std::ostream& out, const SurfaceSample& s, const std::string& title) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << s.points.size() << " double\n";
  for (const Vec3& p : s.points) {
    for (int k = 0; k < 3; ++k) require_finite(p[k], "point");
    out << num(p.x()) << ' ' << num(p.y()) << ' ' << num(p.z()) << '\n';
  }
  out << "CELLS " << s.cells.size() << ' ' << 5 * s.cells.size() << '\n';
  for (const auto& c : s.cells) out << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  out << "CELL_TYPES " << s.cells.size() << '\n';
  for (std::size_t c = 0; c < s.cells.size(); ++c) out << "9\n";
  out << "POINT_DATA " << s.points.size() << '\n';
  out << "SCALARS displacement_norm double 1\nLOOKUP_TABLE default\n";
  for (double v : s.disp_norm) {
    require_finite(v, "displacement");
    out << num(v) << '\n';
  }
  out << "SCALARS displacement_z double 1\nLOOKUP_TABLE default\n";
  for (double v : s.disp_z) {
    require_finite(v, "displacement");
    out << num(v) << '\n';
  }
  out << "CELL_DATA " << s.cells.size() << '\n';
  out << "SCALARS energy_density double 1\nLOOKUP_TABLE default\n";
  for (double v : s.energy_density) {
    require_finite(v, "energy density");
    out << num(v) << '\n';
  }
}

void write_control_vtk(std::ostream& out, const ControlMesh& mesh, const Eigen::VectorXd& u, const std::string& title) {
  if (u.size() != 3 * mesh.num_vertices()) throw Error("displacement does not match the control mesh");
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 x = mesh.vertex(v) + u.segment<3>(3 * v);
    for (int k = 0; k < 3; ++k) require_finite(x[k], "control point");
    out << num(x.x()) << ' ' << num(x.y()) << ' ' << num(x.z()) << '\n';
  }
  out << "CELLS " << mesh.num_faces() << ' ' << 5 * mesh.num_faces() << '\n';
  for (const Quad& f : mesh.faces()) out << "4 " << f[0] << ' ' << f[1] << ' ' << f[2] << ' ' << f[3] << '\n';
  out << "CELL_TYPES " << mesh.num_faces() << '\n';
  for (int f = 0; f < mesh.num_faces(); ++f) out << "9\n";
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "SCALARS displacement_norm double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << num(u.segment<3>(3 * v).norm()) << '\n';
  out << "SCALARS displacement_z double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << num(u[3 * v + 2]) << '\n';
}

std::string snapshot_name(int row) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.vtk", row);
  return buf;
}

std::string control_snapshot_name(int row) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%06d_control.vtk", row);
  return buf;
}

bool has_snapshot(int row, int rows, int every) {
  return row == rows - 1 || (every > 0 && row % every == 0);
}

std::string plot_script(const std::string& history_file) {
  return R"(#!/usr/bin/env python3
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
path = Path(sys.argv[1]) if len(sys.argv) > 1 else here / ")" +
         history_file + R"("
with open(path) as f:
    version = f.readline().strip()
    if version != ")" + std::string(kHistoryVersion) + R"(":
        sys.exit(f"{path}: unsupported history version '{version}'")
    rows = list(csv.DictReader(f))

branches = sorted({int(r["branch"]) for r in rows})
fig, (ax_v, ax_u) = plt.subplots(1, 2, figsize=(11, 4.5))
for b in branches:
    sel = [r for r in rows if int(r["branch"]) == b]
    p = [float(r["pressure"]) for r in sel]
    ax_v.plot([float(r["volume"]) for r in sel], p, marker=".", label=f"branch {b}")
    ax_u.plot([float(r["max_disp"]) for r in sel], p, marker=".", label=f"branch {b}")
ax_v.set_xlabel("enclosed volume")
ax_u.set_xlabel("max |u|")
for ax in (ax_v, ax_u):
    ax.set_ylabel("pressure")
    ax.grid(True, alpha=0.3)
    ax.legend()
fig.tight_layout()
out = path.with_suffix(".png")
fig.savefig(out, dpi=150)
print(out)
)";
}

}  // namespace shellpath::app
