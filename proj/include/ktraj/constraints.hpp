#pragma once

#include "ktraj/types.hpp"

namespace ktraj {

struct FeasibilityReport
{
  double max_speed_violation = 0; // normalized units
  double max_accel_violation = 0;
  double speed_active_fraction = 0;
  double slew_active_fraction = 0;
};

/// Violations are measured against the bounds scaled to the trajectory's
/// decimation (alpha*d, beta*d^2). An interval counts as active when its norm
/// reaches (1 - activity_tol) of its bound.
FeasibilityReport check_feasibility(Trajectory const &traj, Bounds bounds, double activity_tol = 0.01);
FeasibilityReport check_feasibility(Trajectory const &traj, HardwareSpec const &spec, double activity_tol = 0.01);

struct ProjectionOptions
{
  double tol = 1e-9;
  int max_iter = 5000;
  int power_iters = 50;
  // Half-width of the coordinate box intersected with the kinematic set;
  // infinity projects onto the kinematic set alone.
  double box = 0.5;
};

struct ShotProjection
{
  Shot point;
  bool converged = false;
  int iterations = 0;
  double violation = 0; // max constraint violation of `point`
  double gap = 0;       // duality gap at exit
};

/// Euclidean projection of one shot onto
///   { z : |z[i+1]-z[i]| <= speed, |z[i+2]-2z[i+1]+z[i]| <= accel }.
/// Infinite bounds disable a constraint family. No box clipping.
ShotProjection project_shot(Shot const &shot, Bounds bounds, ProjectionOptions const &opt = {});

struct ProjectionResult
{
  Trajectory trajectory;
  bool converged = true;
  int max_iterations = 0;
  double residual = 0; // worst violation over shots before the final box clip
};

/// Projects every shot (bounds scaled to the trajectory's decimation), then
/// clips coordinates to the Nyquist box. Non-convergence is reported, not thrown.
ProjectionResult project(Trajectory const &traj, Bounds bounds, ProjectionOptions const &opt = {});
ProjectionResult project(Trajectory const &traj, HardwareSpec const &spec, ProjectionOptions const &opt = {});

/// Largest eigenvalue of D1'D1 + D2'D2 for an n-point shot, by power iteration.
double stacked_difference_norm_sq(Eigen::Index n, int iters = 50);

} // namespace ktraj
