#pragma once

#include "ktraj/constraints.hpp"
#include "ktraj/metrics.hpp"
#include "ktraj/nufft.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace ktraj {

enum class ConstraintMode
{
  Projection, // projected Adam: project onto the kinematic set after every step
  Penalty,    // Adam on loss + squared-hinge constraint penalties
};

std::string to_string(ConstraintMode m);
ConstraintMode constraint_mode_from_string(std::string const &s);

struct OptimConfig
{
  ConstraintMode mode = ConstraintMode::Projection;
  double lr = 1e-3;
  std::array<double, 2> adam_betas{0.9, 0.999};
  double adam_eps = 1e-8;
  int steps_per_level = 40;
  std::vector<int> decimation_levels{16, 8, 4, 2, 1};
  LossWeights loss_weights{};
  std::array<double, 2> penalty_weights{100.0, 100.0}; // (speed, slew)
  int batch_size = 8;
  std::uint64_t seed = 0;
  int dwell_ratio = 5;

  int n_shots = 16;
  int n_samples = 513; // raster points per shot at decimation 1
  int pipe_iters = 10;
  double projection_tol = 1e-9;
  int projection_max_iter = 5000;
  double activity_tol = 0.01;
  bool reset_adam_between_levels = true; // otherwise moments are resampled with the control points

  void validate() const;
  [[nodiscard]] int total_steps() const { return steps_per_level * int(decimation_levels.size()); }
  [[nodiscard]] ProjectionOptions projection() const { return {projection_tol, projection_max_iter}; }
};

struct AdamState
{
  Eigen::VectorXd params;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  static AdamState fresh(Eigen::VectorXd params);
};

struct AdamOptions
{
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update (descent direction).
AdamState adam_step(AdamState state, Eigen::VectorXd const &grad, double lr, AdamOptions const &opt = {});

struct ValueAndGrad
{
  double value = 0;
  Trajectory grad; // same shape and decimation as the input
};

/// mu_speed * sum (|dk| - alpha)_+^2 + mu_slew * sum (|d2k| - beta)_+^2, bounds scaled
/// to the trajectory's decimation.
ValueAndGrad penalty_value_and_grad(Trajectory const &traj, Bounds bounds, std::array<double, 2> mu);

/// Loss of the simulated acquisition + density-compensated reconstruction,
/// averaged over the batch, and its gradient w.r.t. the control points. The
/// density weights are treated as constants.
ValueAndGrad pipeline_value_and_grad(Trajectory const &control, std::span<ComplexImage const> batch,
                                     DensityWeights const &weights, OptimConfig const &cfg);
double pipeline_loss(Trajectory const &control, std::span<ComplexImage const> batch, DensityWeights const &weights,
                     OptimConfig const &cfg);

/// pipeline_value_and_grad with Pipe weights recomputed at `control`.
ValueAndGrad trajectory_gradient(Trajectory const &control, std::span<ComplexImage const> batch,
                                 HardwareSpec const &spec, OptimConfig const &cfg);

struct StepRecord
{
  int step = 0;
  int decimation = 1;
  double loss = 0;    // reconstruction loss at the pre-update trajectory
  double penalty = 0; // constraint penalty at the pre-update trajectory (penalty mode)
  FeasibilityReport feasibility;  // of the post-update trajectory
  bool projection_converged = true;
  double projection_residual = 0;
};

struct RunHistory
{
  std::vector<StepRecord> steps;
  std::vector<int> level_starts; // first step index of each level
  Trajectory initial;
  Trajectory final;
  std::vector<std::string> warnings;
};

/// Writes `step,level,loss,max_speed_viol,max_slew_viol,slew_active_fraction`
/// with a header line, 17 significant digits.
void write_history(std::ostream &os, RunHistory const &h);

using StepObserver = std::function<void(StepRecord const &, Trajectory const &)>;

/// Multi-resolution trajectory learning, coarse to fine. Starts from `init`
/// (decimation 1) or from the projected radial initialization.
RunHistory optimize(std::span<ComplexImage const> dataset, HardwareSpec const &spec, OptimConfig const &cfg,
                    std::optional<Trajectory> init = std::nullopt, StepObserver const &observer = {});

/// Batch indices for a step, drawn with replacement from a generator keyed on (seed, step).
std::vector<std::size_t> sample_batch(std::uint64_t seed, int step, std::size_t dataset_size, int batch_size);

} // namespace ktraj
