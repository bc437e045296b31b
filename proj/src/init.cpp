#include "ktraj/init.hpp"
#include "ktraj/error.hpp"

#include <cmath>
#include <numbers>

namespace ktraj {

Trajectory radial_spokes(int n_shots, int n_samples)
{
  if (n_shots < 1 || n_samples < 2) {
    throw Error("radial_init: need n_shots >= 1 and n_samples >= 2");
  }
  Trajectory t(n_shots, n_samples);
  for (int j = 0; j < n_shots; ++j) {
    double const theta = std::numbers::pi * j / n_shots;
    double const cx = 0.5 * std::cos(theta), cy = 0.5 * std::sin(theta);
    for (int i = 0; i < n_samples; ++i) {
      double const s = double(i) / double(n_samples - 1);
      t.shot(j)(i, 0) = s * cx;
      t.shot(j)(i, 1) = s * cy;
    }
  }
  return t;
}

Trajectory radial_init(int n_shots, int n_samples, HardwareSpec const &spec, ProjectionOptions const &opt)
{
  return project(radial_spokes(n_shots, n_samples), spec, opt).trajectory;
}

} // namespace ktraj
