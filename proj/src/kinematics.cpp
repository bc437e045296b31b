#include "ktraj/kinematics.hpp"
#include "ktraj/error.hpp"

namespace ktraj {

Bounds normalized_bounds(HardwareSpec const &spec)
{
  if (!(spec.gamma > 0) || !(spec.g_max > 0) || !(spec.s_max > 0) || !(spec.raster_dt > 0) || !(spec.fov > 0) ||
      spec.matrix_size <= 0) {
    throw Error("normalized_bounds: hardware fields must be strictly positive");
  }
  double const two_kmax = 2.0 * spec.k_max();
  return {spec.gamma * spec.g_max * spec.raster_dt / two_kmax,
          spec.gamma * spec.s_max * spec.raster_dt * spec.raster_dt / two_kmax};
}

Bounds scaled_bounds(Bounds b, int decimation)
{
  double const d = decimation;
  return {b.speed * d, b.accel * d * d};
}

GradientProfile traj_to_profile(Trajectory const &traj, HardwareSpec const &spec)
{
  if (traj.decimation() != 1) {
    throw Error("traj_to_profile: trajectory must be at raster resolution");
  }
  if (traj.n_samples() < 3) {
    throw Error("traj_to_profile: need at least 3 samples per shot");
  }
  double const to_tesla = 2.0 * spec.k_max() / (spec.gamma * spec.raster_dt);
  Eigen::Index const ns = traj.n_samples();
  GradientProfile p;
  for (auto const &s : traj.shots()) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> g = (s.bottomRows(ns - 1) - s.topRows(ns - 1)) * to_tesla;
    Eigen::Matrix<double, Eigen::Dynamic, 2> sr = (g.bottomRows(ns - 2) - g.topRows(ns - 2)) / spec.raster_dt;
    p.gradient_norms.push_back(g.rowwise().norm());
    p.slew_norms.push_back(sr.rowwise().norm());
    p.gradients.push_back(std::move(g));
    p.slew.push_back(std::move(sr));
  }
  return p;
}

double undersampling_factor(int N, int n_shots, int n_samples, int dwell_ratio)
{
  if (N <= 0 || n_shots <= 0 || n_samples <= 0 || dwell_ratio <= 0) {
    throw Error("undersampling_factor: all inputs must be positive");
  }
  double const acquired = static_cast<double>(n_shots) * n_samples * dwell_ratio;
  return static_cast<double>(N) * N / acquired;
}

} // namespace ktraj
