#include "ktraj/bench.hpp"
#include "ktraj/density.hpp"
#include "ktraj/error.hpp"
#include "ktraj/interp.hpp"
#include "ktraj/kinematics.hpp"
#include "ktraj/phantom.hpp"
#include "ktraj/recon.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <numeric>

namespace ktraj {

void export_profiles(std::ostream &os, Trajectory const &traj, HardwareSpec const &spec)
{
  auto const p = traj_to_profile(traj, spec);
  double const dt_ms = spec.raster_dt * 1e3;
  os << "shot,t_ms,grad_norm_mT_per_m,slew_norm_T_per_m_per_s\n";
  for (int c = 0; c < traj.n_shots(); ++c) {
    for (Eigen::Index i = 0; i < p.slew_norms[c].size(); ++i) {
      os << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", c, double(i) * dt_ms, p.gradient_norms[c][i] * 1e3,
                        p.slew_norms[c][i]);
    }
  }
}

void export_profiles(std::filesystem::path const &path, Trajectory const &traj, HardwareSpec const &spec)
{
  std::ofstream os(path);
  if (!os) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  export_profiles(os, traj, spec);
  if (!os) {
    throw Error(fmt::format("error writing {}", path.string()));
  }
}

Summary summarize(std::vector<double> v)
{
  if (v.empty()) {
    return {};
  }
  std::sort(v.begin(), v.end());
  auto quantile = [&v](double q) {
    double const pos = q * double(v.size() - 1);
    auto const lo = static_cast<size_t>(pos);
    auto const hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
  };
  Summary s;
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  return s;
}

ComplexImage reconstruct(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w, ReconMethod recon,
                         int cg_iters)
{
  switch (recon) {
  case ReconMethod::Adjoint:
    return plan.adjoint(y);
  case ReconMethod::DcAdjoint:
    return dc_adjoint(plan, y, w);
  case ReconMethod::Cg:
    return cg_least_squares(plan, y, w, cg_iters).image;
  }
  throw Error("reconstruct: unknown method");
}

BenchReport evaluate(Trajectory const &traj, std::span<ComplexImage const> dataset, HardwareSpec const &spec,
                     ReconMethod recon, EvalOptions const &opt)
{
  if (dataset.empty()) {
    throw Error("evaluate: empty dataset");
  }
  int const N = spec.matrix_size;
  NufftPlan const plan(dwell_locations(traj, opt.dwell_ratio), N);
  DensityWeights const w = recon == ReconMethod::Adjoint ? DensityWeights::Ones(plan.n_samples())
                                                         : pipe_weights(plan, opt.pipe_iters);
  BenchReport r;
  r.recon = recon;
  for (auto const &x : dataset) {
    if (x.rows() != N || x.cols() != N) {
      throw Error("evaluate: dataset image size differs from matrix_size");
    }
    ComplexImage const xhat = reconstruct(plan, plan.forward(x), w, recon, opt.cg_iters);
    ComplexImage const mag_hat = xhat.cwiseAbs().cast<Cx>();
    ComplexImage const mag_ref = x.cwiseAbs().cast<Cx>();
    r.psnr.push_back(psnr(mag_hat, mag_ref));
    r.ssim.push_back(ssim(mag_hat, mag_ref));
  }
  r.psnr_summary = summarize(r.psnr);
  r.ssim_summary = summarize(r.ssim);
  if (traj.n_samples() >= 3) {
    r.feasibility = check_feasibility(traj, spec, opt.activity_tol);
  }
  int const raster_samples = (traj.n_samples() - 1) * traj.decimation() + 1;
  r.undersampling_factor = undersampling_factor(N, traj.n_shots(), raster_samples, opt.dwell_ratio);
  return r;
}

ModeComparison compare_modes(OptimConfig const &cfg_projection, OptimConfig const &cfg_penalty,
                             std::span<ComplexImage const> train, std::span<ComplexImage const> test,
                             HardwareSpec const &spec, ReconMethod recon, int cg_iters)
{
  ModeComparison out;
  out.projection_history = optimize(train, spec, cfg_projection);
  out.penalty_history = optimize(train, spec, cfg_penalty);
  auto eval = [&](RunHistory const &h, OptimConfig const &cfg, std::string label) {
    EvalOptions const eo{cfg.dwell_ratio, cfg.pipe_iters, cg_iters, cfg.activity_tol};
    auto r = evaluate(h.final, test.empty() ? train : test, spec, recon, eo);
    r.label = std::move(label);
    r.seed = cfg.seed;
    return r;
  };
  out.projection = eval(out.projection_history, cfg_projection, to_string(cfg_projection.mode));
  out.penalty = eval(out.penalty_history, cfg_penalty, to_string(cfg_penalty.mode));
  return out;
}

nlohmann::json to_json(Summary const &s)
{
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}};
}

nlohmann::json to_json(FeasibilityReport const &f)
{
  return {{"max_speed_violation", f.max_speed_violation},
          {"max_accel_violation", f.max_accel_violation},
          {"speed_active_fraction", f.speed_active_fraction},
          {"slew_active_fraction", f.slew_active_fraction}};
}

nlohmann::json to_json(BenchReport const &r)
{
  return {{"label", r.label},
          {"recon", to_string(r.recon)},
          {"psnr", r.psnr},
          {"ssim", r.ssim},
          {"psnr_summary", to_json(r.psnr_summary)},
          {"ssim_summary", to_json(r.ssim_summary)},
          {"feasibility", to_json(r.feasibility)},
          {"undersampling_factor", r.undersampling_factor},
          {"config_hash", r.config_hash},
          {"seed", r.seed}};
}

nlohmann::json to_json(ModeComparison const &c)
{
  auto activity = [](BenchReport const &r, RunHistory const &h) {
    return nlohmann::json{{"mode", r.label},
                          {"slew_active_fraction", r.feasibility.slew_active_fraction},
                          {"speed_active_fraction", r.feasibility.speed_active_fraction},
                          {"max_speed_violation", r.feasibility.max_speed_violation},
                          {"max_accel_violation", r.feasibility.max_accel_violation},
                          {"final_loss", h.steps.empty() ? 0.0 : h.steps.back().loss},
                          {"warnings", h.warnings.size()}};
  };
  return {{"projection", to_json(c.projection)},
          {"penalty", to_json(c.penalty)},
          {"activity", {activity(c.projection, c.projection_history), activity(c.penalty, c.penalty_history)}}};
}

Datasets make_datasets(DataConfig const &data, int N)
{
  if (data.n_train < 1 || data.n_test < 0) {
    throw Error("make_datasets: need n_train >= 1 and n_test >= 0");
  }
  return {phantom_dataset(N, data.n_train, data.data_seed, data.phase_smoothness),
          phantom_dataset(N, data.n_test, data.data_seed + std::uint64_t(data.n_train), data.phase_smoothness)};
}

} // namespace ktraj
