// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails. Tolerances are fixed below.

#include "ktraj/bench.hpp"
#include "ktraj/config.hpp"
#include "ktraj/constraints.hpp"
#include "ktraj/density.hpp"
#include "ktraj/kinematics.hpp"
#include "ktraj/metrics.hpp"
#include "ktraj/nufft.hpp"
#include "ktraj/optimizer.hpp"
#include "ktraj/phantom.hpp"
#include "ktraj/recon.hpp"

#include "oracles.hpp"

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <limits>
#include <sstream>

using namespace ktraj;

namespace {

constexpr double kAdjointTol = 1e-10;
constexpr double kLocationGradTol = 1e-5;
constexpr double kOracleDistanceTol = 1e-4;
constexpr double kFeasibilityTol = 1e-9;
constexpr double kIdempotenceTol = 1e-8;
constexpr double kAnalyticTol = 1e-9;
constexpr double kPipeTol = 1e-10;
constexpr double kInversionTol = 1e-8;
constexpr double kLossGradTol = 1e-4;
constexpr double kMinPsnrGainDb = 1.0;
constexpr double kFeasibilityFactor = 10.0; // intermediate trajectories: violation <= factor * projection tol

struct Outcome
{
  bool pass;
  std::string detail;
};

Outcome uf_arithmetic()
{
  double const uf = undersampling_factor(320, 16, 512, 5);
  return {uf == 2.5, fmt::format("undersampling_factor(320, 16, 512, 5) = {:.17g}", uf)};
}

Outcome adjointness()
{
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ComplexImage const x = oracle::random_image(rng, 32);
    Locations const loc = oracle::random_locations(rng, 200);
    Eigen::VectorXcd const y = oracle::random_cvec(rng, 200);
    NufftPlan const plan(loc, 32);
    Eigen::VectorXcd const fx = plan.forward(x);
    ComplexImage const fhy = plan.adjoint(y);
    Cx const lhs = y.dot(fx);                                // <y, F x>
    Cx const rhs = (fhy.conjugate().cwiseProduct(x)).sum(); // <F^H y, x>
    worst = std::max(worst, std::abs(lhs - rhs) / (fx.norm() * y.norm()));
  }
  return {worst <= kAdjointTol, fmt::format("max normalized defect {:.3e} over 50 pairs (tol {:.0e})", worst,
                                            kAdjointTol)};
}

Outcome location_gradient()
{
  std::mt19937_64 rng(3);
  double const h = 1e-6;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexImage const x = oracle::random_image(rng, 16);
    Locations const loc = oracle::random_locations(rng, 10, 0.45);
    Eigen::VectorXcd const c = oracle::random_cvec(rng, 10);
    Locations const g = nufft_location_grad(x, loc, c);
    auto scalar = [&](Locations const &l) { return c.dot(oracle::dft(x, l)).real(); };
    for (Eigen::Index m = 0; m < loc.rows(); ++m) {
      for (int a = 0; a < 2; ++a) {
        Locations lp = loc, lm = loc;
        lp(m, a) += h;
        lm(m, a) -= h;
        double const fd = (scalar(lp) - scalar(lm)) / (2 * h);
        worst = std::max(worst, std::abs(g(m, a) - fd) / std::abs(fd));
      }
    }
  }
  return {worst <= kLocationGradTol,
          fmt::format("max relative error {:.3e} over 20 trials x 20 entries (tol {:.0e})", worst, kLocationGradTol)};
}

double shot_violation(Shot const &z, Bounds b)
{
  double v = 0;
  for (Eigen::Index i = 0; i + 1 < z.rows(); ++i) {
    v = std::max(v, (z.row(i + 1) - z.row(i)).norm() - b.speed);
  }
  for (Eigen::Index i = 0; i + 2 < z.rows(); ++i) {
    v = std::max(v, (z.row(i + 2) - 2 * z.row(i + 1) + z.row(i)).norm() - b.accel);
  }
  return v;
}

Outcome projection()
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Bounds const b{0.1, 0.05};
  ProjectionOptions const opt;
  double dist = 0, viol = 0, idem = 0;
  bool converged = true;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Index const n = 3 + trial % 4;
    Shot k(n, 2);
    for (Eigen::Index i = 0; i < k.size(); ++i) {
      k(i) = u(rng);
    }
    auto const p = project_shot(k, b, opt);
    auto const pp = project_shot(p.point, b, opt);
    Shot const ref = oracle::slow_projection(k, b.speed, b.accel, 100000, opt.box);
    converged = converged && p.converged;
    dist = std::max(dist, (p.point - ref).norm() / ref.norm());
    viol = std::max(viol, shot_violation(p.point, b));
    idem = std::max(idem, (pp.point - p.point).norm());
  }
  // [0, 1] lies outside the Nyquist box, so the analytic case uses the kinematic set alone.
  ProjectionOptions free = opt;
  free.box = std::numeric_limits<double>::infinity();
  Shot line = Shot::Zero(2, 2);
  line(1, 0) = 1.0;
  auto const a = project_shot(line, Bounds{0.5, std::numeric_limits<double>::infinity()}, free);
  double const aerr = std::max({std::abs(a.point(0, 0) - 0.25), std::abs(a.point(1, 0) - 0.75),
                                std::abs(a.point(0, 1)), std::abs(a.point(1, 1))});
  bool const pass = converged && dist <= kOracleDistanceTol && viol <= kFeasibilityTol && idem <= kIdempotenceTol &&
                    aerr <= kAnalyticTol;
  return {pass, fmt::format("oracle distance {:.2e}, violation {:.2e}, idempotence {:.2e}, [0,1] case error {:.2e}",
                            dist, viol, idem, aerr)};
}

Outcome pipe_fixed_point()
{
  int const N = 16;
  DensityWeights const w = pipe_weights(oracle::cartesian_grid(N), N, 2);
  double const err = (w.array() - 1.0 / (N * N)).abs().maxCoeff();
  return {err <= kPipeTol, fmt::format("max |w - 1/N^2| = {:.3e} after 2 iterations (tol {:.0e})", err, kPipeTol)};
}

Outcome exact_inversion()
{
  int const N = 16;
  std::mt19937_64 rng(6);
  ComplexImage const x = oracle::random_image(rng, N);
  NufftPlan const plan(oracle::cartesian_grid(N), N);
  DensityWeights const w = pipe_weights(plan);
  ComplexImage const xr = dc_adjoint(plan, plan.forward(x), w);
  double const err = (xr - x).norm() / x.norm();
  return {err <= kInversionTol, fmt::format("relative error {:.3e} (tol {:.0e})", err, kInversionTol)};
}

Outcome loss_gradient()
{
  int const N = 32;
  ComplexImage const ref = synth_phase(shepp_logan(N, 7), 0.25, 7);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  ComplexImage x = ref;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) += Cx(noise(rng), noise(rng));
  }
  std::uniform_int_distribution<Eigen::Index> pick(0, x.size() - 1);
  double const h = 1e-6;
  double worst = 0;
  std::string where;
  for (LossWeights lam : {LossWeights{1, 0, 0}, LossWeights{0, 1, 0}, LossWeights{0, 0, 1}, LossWeights{1, 1, 1}}) {
    ComplexImage const g = loss_grad_image(x, ref, lam);
    for (int s = 0; s < 20; ++s) {
      Eigen::Index const p = pick(rng);
      for (Cx dir : {Cx(1, 0), Cx(0, 1)}) {
        ComplexImage xp = x, xm = x;
        xp(p) += h * dir;
        xm(p) -= h * dir;
        double const fd = (combined_loss(xp, ref, lam) - combined_loss(xm, ref, lam)) / (2 * h);
        // dL = 2 Re sum conj(g) dx
        double const an = 2.0 * (dir.real() != 0 ? g(p).real() : g(p).imag());
        double const rel = std::abs(an - fd) / std::abs(fd);
        if (rel > worst) {
          worst = rel;
          where = fmt::format("lambda ({},{},{})", lam.l1, lam.l2, lam.ssim);
        }
      }
    }
  }
  return {worst <= kLossGradTol, fmt::format("max relative error {:.3e} at {} over 4 x 20 pixels, re and im (tol {:.0e})",
                                             worst, where, kLossGradTol)};
}

// Shared state for the desk-fixture criteria.
struct DeskRuns
{
  RunConfig cfg;
  Datasets data;
  RunHistory projection;
  double max_intermediate_violation = 0;
  std::string history_csv;
  double seconds = 0;
};

RunHistory run_fixture(RunConfig const &cfg, Datasets const &data, double *max_violation)
{
  Bounds const b = normalized_bounds(cfg.hardware);
  return optimize(data.train, cfg.hardware, cfg.optim, std::nullopt, [&](StepRecord const &, Trajectory const &t) {
    if (max_violation) {
      auto const rep = check_feasibility(t, b, cfg.optim.activity_tol);
      *max_violation = std::max({*max_violation, rep.max_speed_violation, rep.max_accel_violation});
    }
  });
}

std::string history_text(RunHistory const &h)
{
  std::ostringstream os;
  write_history(os, h);
  return os.str();
}

EvalOptions eval_options(RunConfig const &c)
{
  return {c.optim.dwell_ratio, c.optim.pipe_iters, c.data.cg_iters, c.optim.activity_tol};
}

Outcome trajectory_learning(DeskRuns &d)
{
  auto const t0 = std::chrono::steady_clock::now();
  d.projection = run_fixture(d.cfg, d.data, &d.max_intermediate_violation);
  d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  d.history_csv = history_text(d.projection);
  auto const eo = eval_options(d.cfg);
  auto const before = evaluate(d.projection.initial, d.data.test, d.cfg.hardware, ReconMethod::DcAdjoint, eo);
  auto const after = evaluate(d.projection.final, d.data.test, d.cfg.hardware, ReconMethod::DcAdjoint, eo);
  double const gain = after.psnr_summary.mean - before.psnr_summary.mean;
  double const limit = kFeasibilityFactor * d.cfg.optim.projection_tol;
  bool const pass = gain >= kMinPsnrGainDb && d.max_intermediate_violation <= limit &&
                    d.projection.steps.size() == 200;
  return {pass, fmt::format("held-out mean PSNR {:.3f} -> {:.3f} dB (gain {:.3f}, need {:.1f}); SSIM {:.4f} -> {:.4f}; "
                            "max violation over {} steps {:.2e} (limit {:.0e}); {:.0f} s",
                            before.psnr_summary.mean, after.psnr_summary.mean, gain, kMinPsnrGainDb,
                            before.ssim_summary.mean, after.ssim_summary.mean, d.projection.steps.size(),
                            d.max_intermediate_violation, limit, d.seconds)};
}

Outcome projection_vs_penalty(DeskRuns const &d)
{
  RunConfig pen = d.cfg;
  pen.optim.mode = ConstraintMode::Penalty;
  pen.optim.penalty_weights = {100.0, 100.0};
  RunHistory const h = run_fixture(pen, d.data, nullptr);
  Bounds const b = normalized_bounds(d.cfg.hardware);
  auto const fp = check_feasibility(d.projection.final, b, d.cfg.optim.activity_tol);
  auto const fq = check_feasibility(h.final, b, d.cfg.optim.activity_tol);
  double const pen_violation = std::max(fq.max_speed_violation, fq.max_accel_violation);
  bool const pass = fp.slew_active_fraction > fq.slew_active_fraction && pen_violation > d.cfg.optim.projection_tol;
  return {pass, fmt::format("slew_active_fraction projection {:.4f} vs penalty(mu=100) {:.4f}; penalty max violation "
                            "{:.3e} (projection tol {:.0e})",
                            fp.slew_active_fraction, fq.slew_active_fraction, pen_violation,
                            d.cfg.optim.projection_tol)};
}

Outcome determinism(DeskRuns const &d)
{
  std::string const again = history_text(run_fixture(d.cfg, d.data, nullptr));
  bool const same = again == d.history_csv;
  return {same, fmt::format("history export {} bytes, repeat run {}", d.history_csv.size(),
                            same ? "byte-identical" : "differs")};
}

} // namespace

int main(int argc, char **argv)
{
  std::string const fixture = argc > 1 ? argv[1] : KTRAJ_DESK_FIXTURE;
  DeskRuns desk;
  desk.cfg = load_config(fixture);
  desk.cfg.validate();
  desk.data = make_datasets(desk.cfg.data, desk.cfg.hardware.matrix_size);

  std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
    {"UF arithmetic", uf_arithmetic},
    {"NUFFT adjointness", adjointness},
    {"location-gradient exactness", location_gradient},
    {"projection correctness", projection},
    {"Pipe fixed point", pipe_fixed_point},
    {"exact-inversion sanity", exact_inversion},
    {"loss gradient", loss_gradient},
    {"end-to-end trajectory learning", [&] { return trajectory_learning(desk); }},
    {"projection-vs-penalty ordering", [&] { return projection_vs_penalty(desk); }},
    {"determinism", [&] { return determinism(desk); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (std::exception const &e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("criterion {:2d} {} {}: {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed (fixture {})\n", criteria.size() - failed, criteria.size(), fixture);
  return failed == 0 ? 0 : 1;
}
