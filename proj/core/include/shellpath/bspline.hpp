#pragma once

#include <array>

namespace shellpath {

/// Uniform cubic B-spline functions on one knot span, t in [0, 1].
struct BsplineRow {
  std::array<double, 4> value;
  std::array<double, 4> first;
  std::array<double, 4> second;
};

BsplineRow cubic_bspline_row(double t);

}  // namespace shellpath
