#pragma once

#include <Eigen/Core>

#include "shellpath/discretization.hpp"

namespace shellpath {

/// Volume of the cone from `apex` over the deformed limit surface, (1/3) * integral of (x - apex) . a3~.
/// For a closed surface this is the enclosed volume; for a sector bounded by planes through
/// the apex it is the volume of that sector.
double enclosed_volume(const Discretization& disc, const Eigen::VectorXd& u, const Vec3& apex = Vec3::Zero());

/// Deformed surface area.
double surface_area(const Discretization& disc, const Eigen::VectorXd& u);

}  // namespace shellpath
