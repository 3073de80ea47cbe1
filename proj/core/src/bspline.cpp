#include "shellpath/bspline.hpp"

namespace shellpath {

BsplineRow cubic_bspline_row(double t) {
  const double s = 1.0 - t, t2 = t * t, t3 = t2 * t;
  BsplineRow r;
  r.value = {s * s * s / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0, (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0};
  r.first = {-0.5 * s * s, 1.5 * t2 - 2.0 * t, -1.5 * t2 + t + 0.5, 0.5 * t2};
  r.second = {s, 3.0 * t - 2.0, -3.0 * t + 1.0, t};
  return r;
}

}  // namespace shellpath
