#pragma once

#include "ktraj/constraints.hpp"

namespace ktraj {

/// Center-out radial spokes: shot j runs from (0,0) to 0.5 (cos t_j, sin t_j),
/// t_j = pi j / n_shots, in n_samples uniform steps, then projected onto the
/// kinematic constraint set.
Trajectory radial_init(int n_shots, int n_samples, HardwareSpec const &spec, ProjectionOptions const &opt = {});

/// The same spokes without projection.
Trajectory radial_spokes(int n_shots, int n_samples);

} // namespace ktraj
