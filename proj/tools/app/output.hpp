#pragma once

#include <array>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shellpath/continuation.hpp"
#include "shellpath/discretization.hpp"

namespace shellpath::app {

/// First line of every history file.
inline constexpr const char* kHistoryVersion = "# shellpath history v1";

struct HistoryRow {
  int step = 0;
  int branch = 0;
  double kappa = 0.0;
  double pressure = 0.0;
  double volume = 0.0;
  double max_disp = 0.0;
  /// NaN where the eigenvalue was not available.
  std::vector<double> eigenvalues;
  int newton_iters = 0;
};

std::string history_header(int modes);
HistoryRow history_row(const StepRecord& r, int modes);
std::string format_row(const HistoryRow& row);

/// Appends one line per record and flushes it, so a crashed run leaves a readable prefix.
class HistoryWriter {
public:
  HistoryWriter(const std::string& path, int modes);
  void append(const StepRecord& r);
  int rows() const { return rows_; }

private:
  std::ofstream out_;
  int modes_;
  int rows_ = 0;
};

struct History {
  int modes = 0;
  std::vector<HistoryRow> rows;
};

/// Validates the version line, the column schema and every row; errors name the line.
History read_history(std::istream& in, const std::string& source = "history");
History read_history(const std::string& path);

/// Samples of the deformed limit surface: resolution x resolution cells per element.
struct SurfaceSample {
  std::vector<Vec3> points;
  std::vector<double> disp_norm, disp_z;
  std::vector<std::array<int, 4>> cells;
  /// n^ab eps_ab at the mid-surface, evaluated at the cell centres.
  std::vector<double> energy_density;
};

/// u is the full displacement vector of disc.mesh().
SurfaceSample sample_surface(const Discretization& disc, const Eigen::VectorXd& u, int resolution);

/// Legacy ASCII VTK unstructured grids. Throws Error on non-finite values.
void write_surface_vtk(std::ostream& out, const SurfaceSample& s, const std::string& title);
void write_control_vtk(std::ostream& out, const ControlMesh& mesh, const Eigen::VectorXd& u, const std::string& title);

/// Snapshot file names for history row `row`.
std::string snapshot_name(int row);
std::string control_snapshot_name(int row);
/// Whether row `row` of `rows` carries a snapshot at the given cadence.
bool has_snapshot(int row, int rows, int every);

/// Python script that plots pressure against volume and against max displacement per branch.
std::string plot_script(const std::string& history_file);

}  // namespace shellpath::app
