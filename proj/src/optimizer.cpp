#include "ktraj/optimizer.hpp"
#include "ktraj/density.hpp"
#include "ktraj/error.hpp"
#include "ktraj/init.hpp"
#include "ktraj/interp.hpp"
#include "ktraj/kinematics.hpp"
#include "ktraj/recon.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <random>

namespace ktraj {

std::string to_string(ConstraintMode m)
{
  return m == ConstraintMode::Projection ? "projection" : "penalty";
}

ConstraintMode constraint_mode_from_string(std::string const &s)
{
  if (s == "projection") {
    return ConstraintMode::Projection;
  }
  if (s == "penalty") {
    return ConstraintMode::Penalty;
  }
  throw Error(fmt::format("unknown constraint mode '{}' (expected projection|penalty)", s));
}

void OptimConfig::validate() const
{
  if (!(lr > 0)) {
    throw Error("config: lr must be positive");
  }
  for (double b : adam_betas) {
    if (!(b > 0 && b < 1)) {
      throw Error("config: adam_betas must lie in (0, 1)");
    }
  }
  if (!(adam_eps > 0)) {
    throw Error("config: adam_eps must be positive");
  }
  if (steps_per_level < 0) {
    throw Error("config: steps_per_level must be >= 0");
  }
  if (decimation_levels.empty() || decimation_levels.back() != 1) {
    throw Error("config: decimation_levels must end at 1");
  }
  for (size_t i = 0; i < decimation_levels.size(); ++i) {
    int const d = decimation_levels[i];
    if (d < 1 || (d & (d - 1)) != 0) {
      throw Error("config: decimation levels must be powers of two");
    }
    if (i > 0 && d >= decimation_levels[i - 1]) {
      throw Error("config: decimation_levels must be strictly decreasing");
    }
    if ((n_samples - 1) % d != 0) {
      throw Error(fmt::format("config: n_samples - 1 = {} is not divisible by decimation {}", n_samples - 1, d));
    }
  }
  if (loss_weights.l1 < 0 || loss_weights.l2 < 0 || loss_weights.ssim < 0) {
    throw Error("config: loss_weights must be nonnegative");
  }
  if (penalty_weights[0] < 0 || penalty_weights[1] < 0) {
    throw Error("config: penalty_weights must be nonnegative");
  }
  if (batch_size < 1 || dwell_ratio < 1 || n_shots < 1 || n_samples < 3 || pipe_iters < 1) {
    throw Error("config: batch_size, dwell_ratio, n_shots, pipe_iters must be >= 1 and n_samples >= 3");
  }
  if (!(projection_tol > 0) || projection_max_iter < 1) {
    throw Error("config: projection_tol must be positive and projection_max_iter >= 1");
  }
  if (!(activity_tol > 0 && activity_tol < 1)) {
    throw Error("config: activity_tol must lie in (0, 1)");
  }
}

AdamState AdamState::fresh(Eigen::VectorXd params)
{
  AdamState s;
  s.m = Eigen::VectorXd::Zero(params.size());
  s.v = Eigen::VectorXd::Zero(params.size());
  s.params = std::move(params);
  return s;
}

AdamState adam_step(AdamState state, Eigen::VectorXd const &grad, double lr, AdamOptions const &opt)
{
  if (grad.size() != state.params.size()) {
    throw Error("adam_step: gradient size does not match parameters");
  }
  state.t += 1;
  state.m = opt.beta1 * state.m + (1.0 - opt.beta1) * grad;
  state.v = opt.beta2 * state.v + (1.0 - opt.beta2) * grad.cwiseAbs2();
  double const c1 = 1.0 - std::pow(opt.beta1, double(state.t));
  double const c2 = 1.0 - std::pow(opt.beta2, double(state.t));
  state.params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + opt.eps);
  return state;
}

ValueAndGrad penalty_value_and_grad(Trajectory const &traj, Bounds bounds, std::array<double, 2> mu)
{
  if (traj.n_samples() < 3) {
    throw Error("penalty: need at least 3 samples per shot");
  }
  Bounds const b = scaled_bounds(bounds, traj.decimation());
  ValueAndGrad out{0.0, Trajectory(traj.n_shots(), traj.n_samples(), traj.decimation())};
  auto const n = traj.n_samples();
  for (int c = 0; c < traj.n_shots(); ++c) {
    Shot const &k = traj.shot(c);
    Shot &g = out.grad.shot(c);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      Eigen::RowVector2d const d = k.row(i + 1) - k.row(i);
      double const nrm = d.norm();
      double const excess = nrm - b.speed;
      if (excess > 0 && mu[0] != 0) {
        out.value += mu[0] * excess * excess;
        Eigen::RowVector2d const gd = 2.0 * mu[0] * excess * d / nrm;
        g.row(i + 1) += gd;
        g.row(i) -= gd;
      }
    }
    for (Eigen::Index i = 0; i + 2 < n; ++i) {
      Eigen::RowVector2d const d = k.row(i + 2) - 2.0 * k.row(i + 1) + k.row(i);
      double const nrm = d.norm();
      double const excess = nrm - b.accel;
      if (excess > 0 && mu[1] != 0) {
        out.value += mu[1] * excess * excess;
        Eigen::RowVector2d const gd = 2.0 * mu[1] * excess * d / nrm;
        g.row(i + 2) += gd;
        g.row(i + 1) -= 2.0 * gd;
        g.row(i) += gd;
      }
    }
  }
  return out;
}

namespace {

void check_batch(std::span<ComplexImage const> batch, int N)
{
  if (batch.empty()) {
    throw Error("trajectory gradient: empty batch");
  }
  for (auto const &x : batch) {
    if (x.rows() != N || x.cols() != N) {
      throw Error("trajectory gradient: batch images must all be N x N");
    }
  }
}

} // namespace

double pipeline_loss(Trajectory const &control, std::span<ComplexImage const> batch, DensityWeights const &weights,
                     OptimConfig const &cfg)
{
  int const N = batch.empty() ? 0 : int(batch.front().rows());
  check_batch(batch, N);
  NufftPlan const plan(dwell_locations(control, cfg.dwell_ratio), N);
  double loss = 0;
  for (auto const &x : batch) {
    loss += combined_loss(dc_adjoint(plan, plan.forward(x), weights), x, cfg.loss_weights);
  }
  return loss / double(batch.size());
}

ValueAndGrad pipeline_value_and_grad(Trajectory const &control, std::span<ComplexImage const> batch,
                                     DensityWeights const &weights, OptimConfig const &cfg)
{
  int const N = batch.empty() ? 0 : int(batch.front().rows());
  check_batch(batch, N);
  NufftPlan const plan(dwell_locations(control, cfg.dwell_ratio), N);
  if (weights.size() != plan.n_samples()) {
    throw Error("trajectory gradient: density weights do not match the sample count");
  }
  Eigen::VectorXcd const wc = weights.cast<Cx>();

  // xhat = F^H W F x. With g = dL/d conj(xhat), dL = 2 Re<g, dxhat> splits into
  // the data path through F and the location dependence of F^H:
  //   dL/dk = 2 [ d/dk Re<W F g, F(k) x> + d/dk Re<W F x, F(k) g> ].
  double loss = 0;
  Locations grad_loc = Locations::Zero(plan.n_samples(), 2);
  for (auto const &x : batch) {
    Eigen::VectorXcd const wy = plan.forward(x).cwiseProduct(wc);
    ComplexImage const xhat = plan.adjoint(wy);
    loss += combined_loss(xhat, x, cfg.loss_weights);
    ComplexImage const g = loss_grad_image(xhat, x, cfg.loss_weights);
    Eigen::VectorXcd const wfg = plan.forward(g).cwiseProduct(wc);
    grad_loc += 2.0 * (plan.location_grad(x, wfg) + plan.location_grad(g, wy));
  }
  double const inv = 1.0 / double(batch.size());
  if (!grad_loc.allFinite() || !std::isfinite(loss)) {
    throw Error(fmt::format("trajectory gradient: non-finite value (loss {})", loss * inv));
  }

  int const factor = control.decimation() * cfg.dwell_ratio;
  Eigen::Index const per_shot = Eigen::Index(control.n_samples() - 1) * factor + 1;
  std::vector<Shot> shots;
  shots.reserve(control.n_shots());
  for (int c = 0; c < control.n_shots(); ++c) {
    shots.push_back(upsample_adjoint(Shot(grad_loc.middleRows(c * per_shot, per_shot) * inv), factor));
  }
  return {loss * inv, Trajectory(std::move(shots), control.decimation())};
}

ValueAndGrad trajectory_gradient(Trajectory const &control, std::span<ComplexImage const> batch,
                                 HardwareSpec const &spec, OptimConfig const &cfg)
{
  check_batch(batch, spec.matrix_size);
  NufftPlan const plan(dwell_locations(control, cfg.dwell_ratio), spec.matrix_size);
  DensityWeights const w = pipe_weights(plan, cfg.pipe_iters);
  return pipeline_value_and_grad(control, batch, w, cfg);
}

std::vector<std::size_t> sample_batch(std::uint64_t seed, int step, std::size_t dataset_size, int batch_size)
{
  if (dataset_size == 0) {
    throw Error("sample_batch: empty dataset");
  }
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(step)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, dataset_size - 1);
  std::vector<std::size_t> idx(batch_size);
  for (auto &i : idx) {
    i = pick(rng);
  }
  return idx;
}

void write_history(std::ostream &os, RunHistory const &h)
{
  os << "step,level,loss,max_speed_viol,max_slew_viol,slew_active_fraction\n";
  for (auto const &s : h.steps) {
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.step, s.decimation, s.loss,
                      s.feasibility.max_speed_violation, s.feasibility.max_accel_violation,
                      s.feasibility.slew_active_fraction);
  }
}

RunHistory optimize(std::span<ComplexImage const> dataset, HardwareSpec const &spec, OptimConfig const &cfg,
                    std::optional<Trajectory> init, StepObserver const &observer)
{
  spec.validate();
  cfg.validate();
  if (dataset.empty()) {
    throw Error("optimize: empty dataset");
  }
  if (cfg.dwell_ratio != spec.dwell_ratio()) {
    throw Error(fmt::format("optimize: dwell_ratio {} disagrees with raster_dt/dwell_dt = {}", cfg.dwell_ratio,
                            spec.dwell_ratio()));
  }
  check_batch(dataset, spec.matrix_size);

  Bounds const bounds = normalized_bounds(spec);
  ProjectionOptions const popt = cfg.projection();
  RunHistory h;
  h.initial = init ? *init : radial_init(cfg.n_shots, cfg.n_samples, spec, popt);
  if (h.initial.decimation() != 1 || h.initial.n_samples() != cfg.n_samples || h.initial.n_shots() != cfg.n_shots) {
    throw Error("optimize: initial trajectory does not match n_shots / n_samples at decimation 1");
  }
  if (cfg.total_steps() == 0) {
    h.final = h.initial;
    return h;
  }

  AdamOptions const aopt{cfg.adam_betas[0], cfg.adam_betas[1], cfg.adam_eps};
  Trajectory traj = h.initial;
  int step = 0;
  std::optional<AdamState> adam;
  std::vector<ComplexImage> batch(cfg.batch_size);

  auto constrain = [&](Trajectory const &t, StepRecord *rec) {
    if (cfg.mode == ConstraintMode::Penalty) {
      Trajectory c = t;
      c.clip_to_box();
      return c;
    }
    auto p = project(t, bounds, popt);
    if (!p.converged) {
      h.warnings.push_back(fmt::format("step {}: projection did not converge (residual {:.3g} after {} iterations)",
                                       step, p.residual, p.max_iterations));
    }
    if (rec) {
      rec->projection_converged = p.converged;
      rec->projection_residual = p.residual;
    }
    return std::move(p.trajectory);
  };

  for (int level : cfg.decimation_levels) {
    h.level_starts.push_back(step);
    int const prev_level = traj.decimation();
    traj = constrain(change_resolution(traj, level), nullptr);
    if (!adam || cfg.reset_adam_between_levels) {
      adam = AdamState::fresh(traj.flatten());
    } else {
      // Carry the moments to the new resolution the same way as the control points.
      auto resample = [&](Eigen::VectorXd const &x, int n_samples) {
        return change_resolution(Trajectory::unflatten(x, traj.n_shots(), n_samples, prev_level), level).flatten();
      };
      int const prev_samples = int(adam->params.size() / (2 * traj.n_shots()));
      adam->m = resample(adam->m, prev_samples);
      adam->v = resample(adam->v, prev_samples);
      adam->params = traj.flatten();
    }
    for (int s = 0; s < cfg.steps_per_level; ++s, ++step) {
      auto const idx = sample_batch(cfg.seed, step, dataset.size(), cfg.batch_size);
      for (size_t b = 0; b < idx.size(); ++b) {
        batch[b] = dataset[idx[b]];
      }
      StepRecord rec;
      rec.step = step;
      rec.decimation = level;
      auto vg = trajectory_gradient(traj, batch, spec, cfg);
      rec.loss = vg.value;
      Eigen::VectorXd grad = vg.grad.flatten();
      if (cfg.mode == ConstraintMode::Penalty) {
        auto const pen = penalty_value_and_grad(traj, bounds, cfg.penalty_weights);
        rec.penalty = pen.value;
        grad += pen.grad.flatten();
      }
      if (!grad.allFinite()) {
        throw Error(fmt::format("optimize: non-finite gradient at step {} (level {})", step, level));
      }
      adam->params = traj.flatten();
      *adam = adam_step(std::move(*adam), grad, cfg.lr, aopt);
      traj = constrain(Trajectory::unflatten(adam->params, traj.n_shots(), traj.n_samples(), level), &rec);
      rec.feasibility = check_feasibility(traj, bounds, cfg.activity_tol);
      h.steps.push_back(rec);
      if (observer) {
        observer(rec, traj);
      }
    }
  }
  h.final = traj;
  return h;
}

} // namespace ktraj
