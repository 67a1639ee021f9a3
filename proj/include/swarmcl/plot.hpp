#pragma once

// Static SVG figures.

#include <span>
#include <string>

#include "swarmcl/trainer.hpp"
#include "swarmcl/world.hpp"

namespace swarmcl {

// Training loss (log scale) and the horizon K_e against the step.
std::string curve_svg(std::span<const CurvePoint> curve);

// Expert paths as solid lines, predicted positions as circles, goals as
// crosses; one colour per robot.
std::string trajectory_svg(const Trajectory& expert, const Trajectory& predicted);

}  // namespace swarmcl
