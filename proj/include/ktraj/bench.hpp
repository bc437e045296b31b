#pragma once

#include "ktraj/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace ktraj {

/// Writes `shot,t_ms,grad_norm_mT_per_m,slew_norm_T_per_m_per_s`: one row per
/// slew interval (Ns-2 per shot), row i carrying |G[i]| and |S[i]| at t = i*dt.
void export_profiles(std::ostream &os, Trajectory const &traj, HardwareSpec const &spec);
void export_profiles(std::filesystem::path const &path, Trajectory const &traj, HardwareSpec const &spec);

struct Summary
{
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

/// Order statistics with linear interpolation between closest ranks.
Summary summarize(std::vector<double> values);

struct BenchReport
{
  std::string label;
  ReconMethod recon = ReconMethod::DcAdjoint;
  std::vector<double> psnr;
  std::vector<double> ssim;
  Summary psnr_summary;
  Summary ssim_summary;
  FeasibilityReport feasibility;
  double undersampling_factor = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct EvalOptions
{
  int dwell_ratio = 1;
  int pipe_iters = 10;
  int cg_iters = 15;
  double activity_tol = 0.01;
};

/// Simulates y = F x at the dwell-time locations of `traj` for every image,
/// reconstructs, and scores |xhat| against |x| with PSNR and SSIM.
BenchReport evaluate(Trajectory const &traj, std::span<ComplexImage const> dataset, HardwareSpec const &spec,
                     ReconMethod recon, EvalOptions const &opt);

/// Reconstruction of one image from a prepared plan (weights unused for Adjoint).
ComplexImage reconstruct(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w, ReconMethod recon,
                         int cg_iters);

struct ModeComparison
{
  RunHistory projection_history;
  RunHistory penalty_history;
  BenchReport projection;
  BenchReport penalty;
};

/// Runs optimize() once per configuration on `train` and evaluates both final
/// trajectories on `test` with the same reconstruction.
ModeComparison compare_modes(OptimConfig const &cfg_projection, OptimConfig const &cfg_penalty,
                             std::span<ComplexImage const> train, std::span<ComplexImage const> test,
                             HardwareSpec const &spec, ReconMethod recon = ReconMethod::DcAdjoint,
                             int cg_iters = 15);

struct Datasets
{
  std::vector<ComplexImage> train;
  std::vector<ComplexImage> test;
};

/// Phantoms with seeds data_seed .. data_seed+n_train-1 for training and the
/// following n_test seeds for held-out evaluation.
Datasets make_datasets(DataConfig const &data, int N);

nlohmann::json to_json(Summary const &s);
nlohmann::json to_json(FeasibilityReport const &f);
nlohmann::json to_json(BenchReport const &r);
nlohmann::json to_json(ModeComparison const &c);

} // namespace ktraj
