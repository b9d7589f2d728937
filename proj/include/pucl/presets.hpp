#pragma once

#include <string>

#include "pucl/config.hpp"

namespace pucl {

/// Axis-aligned lengths `a`, `b` rotated by `angle` (radians, world frame).
Ellipse make_ellipse2d(double cx, double cy, double a, double b, double angle);

/// Ready-to-run configurations: "2d", "3d", "velocity", "hetero".
/// Throws std::invalid_argument for unknown names.
ExperimentConfig preset(const std::string& task);

}  // namespace pucl
