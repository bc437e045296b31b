#pragma once

#include "ktraj/nufft.hpp"

namespace ktraj {

/// Pipe-style iterative density compensation:
///   w0 = 1/M,  w <- w / |F F^H w|.
/// Throws if any denominator drops below 1e-14.
DensityWeights pipe_weights(NufftPlan const &plan, int iters = 10);
DensityWeights pipe_weights(Locations const &locations, int N, int iters = 10);

/// ||F F^H w| - 1||_inf, the fixed-point residual monitored by the iteration.
double pipe_residual(NufftPlan const &plan, DensityWeights const &w);

} // namespace ktraj
