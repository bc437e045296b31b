#pragma once

#include "ktraj/types.hpp"

namespace ktraj {

/// Piecewise-linear refinement: (factor-1) equally spaced points inserted per
/// interval, Ns' = (Ns-1)*factor + 1, endpoints kept. The result's decimation is
/// control.decimation() / factor when that divides evenly, otherwise 1.
Trajectory upsample_linear(Trajectory const &control, int factor);
Shot upsample_linear(Shot const &control, int factor);

/// Transpose of upsample_linear applied to a per-shot gradient of length Ns'.
Shot upsample_adjoint(Shot const &grad_full, int factor);
Trajectory upsample_adjoint(Trajectory const &grad_full, int factor);

/// Moves control points between dyadic decimation levels: linear refinement
/// toward finer levels, subsampling toward coarser ones.
Trajectory change_resolution(Trajectory const &control, int new_decimation);

/// Dwell-time sample locations of a control trajectory: every shot refined by
/// decimation * dwell_ratio and stacked shot-major, (Ns-1)*ratio + 1 per shot.
/// With match_raster_count, each shot is padded by holding its final point so
/// that a shot of Ns raster points yields exactly Ns * dwell_ratio samples.
Locations dwell_locations(Trajectory const &control, int dwell_ratio, bool match_raster_count = false);

} // namespace ktraj
