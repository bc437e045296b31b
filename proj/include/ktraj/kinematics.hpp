#pragma once

#include "ktraj/types.hpp"

namespace ktraj {

/// Physical gradient and slew-rate waveforms derived from a raster-resolution trajectory.
struct GradientProfile
{
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> gradients; // per shot, (Ns-1) x 2, T/m
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> slew;      // per shot, (Ns-2) x 2, T/m/s
  std::vector<Eigen::VectorXd> gradient_norms;
  std::vector<Eigen::VectorXd> slew_norms;
};

/// Speed and acceleration bounds in normalized k-space units per raster step:
///   alpha = gamma * g_max * dt / (2 k_max),  beta = gamma * s_max * dt^2 / (2 k_max).
Bounds normalized_bounds(HardwareSpec const &spec);

/// Bounds for control points spaced `decimation` raster steps apart.
Bounds scaled_bounds(Bounds b, int decimation);

GradientProfile traj_to_profile(Trajectory const &traj, HardwareSpec const &spec);

/// N^2 / (n_shots * n_samples * dwell_ratio)
double undersampling_factor(int N, int n_shots, int n_samples, int dwell_ratio);

} // namespace ktraj
