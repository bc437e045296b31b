// ktraj: command-line driver for trajectory initialization, learning, evaluation
// and profile export. Every subcommand writes into <out>/<config hash>/.

#include "ktraj/bench.hpp"
#include "ktraj/config.hpp"
#include "ktraj/error.hpp"
#include "ktraj/image_io.hpp"
#include "ktraj/init.hpp"
#include "ktraj/kinematics.hpp"
#include "ktraj/optimizer.hpp"
#include "ktraj/traj_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ktraj;

namespace {

struct Common
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
  bool quiet = false;
};

struct Run
{
  RunConfig cfg;
  std::string hash;
  fs::path dir;
};

Run open_run(Common const &c)
{
  Run r;
  if (!c.config.empty()) {
    r.cfg = load_config(c.config);
  }
  if (c.seed) {
    r.cfg.optim.seed = *c.seed;
  }
  r.cfg.validate();
  r.hash = config_hash(r.cfg);
  r.dir = fs::path(c.out) / r.hash;
  fs::create_directories(r.dir);
  std::ofstream(r.dir / "config.txt") << to_text(r.cfg);
  return r;
}

void write_json(fs::path const &p, nlohmann::json const &j)
{
  std::ofstream os(p);
  if (!os) {
    throw Error(fmt::format("cannot write {}", p.string()));
  }
  os << j.dump(2) << '\n';
}

EvalOptions eval_options(RunConfig const &c)
{
  return {c.optim.dwell_ratio, c.optim.pipe_iters, c.data.cg_iters, c.optim.activity_tol};
}

std::vector<ComplexImage> load_images(std::vector<std::string> const &paths, int N)
{
  std::vector<ComplexImage> out;
  for (auto const &p : paths) {
    RealImage const img = load_gray_image(p);
    if (img.rows() != N) {
      throw Error(fmt::format("{}: size {} differs from matrix_size {}", p, img.rows(), N));
    }
    out.push_back(img.cast<Cx>());
  }
  return out;
}

BenchReport labelled(BenchReport r, std::string label, Run const &run)
{
  r.label = std::move(label);
  r.config_hash = run.hash;
  r.seed = run.cfg.optim.seed;
  return r;
}

Trajectory initial_trajectory(RunConfig const &c)
{
  return radial_init(c.optim.n_shots, c.optim.n_samples, c.hardware, c.optim.projection());
}

int cmd_init(Common const &c)
{
  Run const run = open_run(c);
  Trajectory const t = initial_trajectory(run.cfg);
  save_trajectory(run.dir / "trajectory_init.csv", t);
  export_profiles(run.dir / "profiles_init.csv", t, run.cfg.hardware);
  fmt::print("{}\n", (run.dir / "trajectory_init.csv").string());
  return 0;
}

int cmd_optimize(Common const &c)
{
  Run const run = open_run(c);
  auto const data = make_datasets(run.cfg.data, run.cfg.hardware.matrix_size);
  int const total = run.cfg.optim.total_steps();
  auto const h = optimize(data.train, run.cfg.hardware, run.cfg.optim, std::nullopt,
                          [&](StepRecord const &r, Trajectory const &) {
                            if (!c.quiet && (r.step % 10 == 0 || r.step + 1 == total)) {
                              fmt::print(stderr, "step {:4d}/{} level {:2d} loss {:.6f} slew active {:.3f}\n",
                                         r.step + 1, total, r.decimation, r.loss,
                                         r.feasibility.slew_active_fraction);
                            }
                          });
  {
    std::ofstream os(run.dir / "history.csv");
    write_history(os, h);
  }
  save_trajectory(run.dir / "trajectory_init.csv", h.initial);
  save_trajectory(run.dir / "trajectory_final.csv", h.final);
  export_profiles(run.dir / "profiles_final.csv", h.final, run.cfg.hardware);

  auto const eo = eval_options(run.cfg);
  auto const& test = data.test.empty() ? data.train : data.test;
  auto const before = labelled(evaluate(h.initial, test, run.cfg.hardware, run.cfg.data.recon, eo), "initial", run);
  auto const after = labelled(evaluate(h.final, test, run.cfg.hardware, run.cfg.data.recon, eo), "final", run);
  write_json(run.dir / "optimize.json", {{"config_hash", run.hash},
                                         {"seed", run.cfg.optim.seed},
                                         {"mode", to_string(run.cfg.optim.mode)},
                                         {"steps", h.steps.size()},
                                         {"level_starts", h.level_starts},
                                         {"warnings", h.warnings},
                                         {"initial", to_json(before)},
                                         {"final", to_json(after)}});
  fmt::print("{}: PSNR {:.3f} -> {:.3f} dB, SSIM {:.4f} -> {:.4f}\n", run.dir.string(), before.psnr_summary.mean,
             after.psnr_summary.mean, before.ssim_summary.mean, after.ssim_summary.mean);
  return 0;
}

int cmd_evaluate(Common const &c, std::string const &traj_path, std::vector<std::string> const &images)
{
  Run const run = open_run(c);
  fs::path const tp = traj_path.empty() ? run.dir / "trajectory_final.csv" : fs::path(traj_path);
  Trajectory const t = load_trajectory(tp);
  std::vector<ComplexImage> data = images.empty()
                                     ? make_datasets(run.cfg.data, run.cfg.hardware.matrix_size).test
                                     : load_images(images, run.cfg.hardware.matrix_size);
  auto const r = labelled(evaluate(t, data, run.cfg.hardware, run.cfg.data.recon, eval_options(run.cfg)),
                          tp.filename().string(), run);
  fs::path const out = run.dir / fmt::format("evaluate_{}_{}.json", tp.stem().string(), to_string(run.cfg.data.recon));
  write_json(out, to_json(r));
  fmt::print("{}: median PSNR {:.3f} dB, median SSIM {:.4f}, UF {:.4g}\n", out.string(), r.psnr_summary.median,
             r.ssim_summary.median, r.undersampling_factor);
  return 0;
}

int cmd_profiles(Common const &c, std::string const &traj_path)
{
  Run const run = open_run(c);
  fs::path const tp = traj_path.empty() ? run.dir / "trajectory_final.csv" : fs::path(traj_path);
  fs::path const out = run.dir / fmt::format("profiles_{}.csv", tp.stem().string());
  export_profiles(out, load_trajectory(tp), run.cfg.hardware);
  fmt::print("{}\n", out.string());
  return 0;
}

int cmd_compare(Common const &c, std::array<double, 2> mu)
{
  Run const run = open_run(c);
  auto const data = make_datasets(run.cfg.data, run.cfg.hardware.matrix_size);
  OptimConfig proj = run.cfg.optim, pen = run.cfg.optim;
  proj.mode = ConstraintMode::Projection;
  pen.mode = ConstraintMode::Penalty;
  pen.penalty_weights = mu;
  auto cmp = compare_modes(proj, pen, data.train, data.test, run.cfg.hardware, run.cfg.data.recon,
                           run.cfg.data.cg_iters);
  cmp.projection.config_hash = cmp.penalty.config_hash = run.hash;
  for (auto const &[h, name] : {std::pair{&cmp.projection_history, "projection"}, {&cmp.penalty_history, "penalty"}}) {
    std::ofstream os(run.dir / fmt::format("history_{}.csv", name));
    write_history(os, *h);
    save_trajectory(run.dir / fmt::format("trajectory_{}.csv", name), h->final);
    export_profiles(run.dir / fmt::format("profiles_{}.csv", name), h->final, run.cfg.hardware);
  }
  auto j = to_json(cmp);
  j["config_hash"] = run.hash;
  j["penalty_weights"] = mu;
  write_json(run.dir / "compare.json", j);
  fmt::print("{}: slew active projection {:.3f}, penalty {:.3f}; PSNR {:.3f} vs {:.3f} dB\n", run.dir.string(),
             cmp.projection.feasibility.slew_active_fraction, cmp.penalty.feasibility.slew_active_fraction,
             cmp.projection.psnr_summary.mean, cmp.penalty.psnr_summary.mean);
  return 0;
}

int cmd_uf(Common const &c)
{
  Run const run = open_run(c);
  auto const &o = run.cfg.optim;
  double const uf = undersampling_factor(run.cfg.hardware.matrix_size, o.n_shots, o.n_samples, o.dwell_ratio);
  nlohmann::json const j{{"matrix_size", run.cfg.hardware.matrix_size},
                         {"n_shots", o.n_shots},
                         {"n_samples", o.n_samples},
                         {"dwell_ratio", o.dwell_ratio},
                         {"undersampling_factor", uf}};
  write_json(run.dir / "uf.json", j);
  fmt::print("{:.17g}\n", uf);
  return 0;
}

void add_common(CLI::App *app, Common &c)
{
  app->add_option("--config", c.config, "run configuration (key = value lines)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "override the optimization seed");
  app->add_option("--out", c.out, "root directory for run directories")->capture_default_str();
  app->add_flag("-q,--quiet", c.quiet, "no progress output");
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"k-space trajectory learning under hardware constraints"};
  app.require_subcommand(1);
  Common common;
  std::string traj;
  std::vector<std::string> images;
  std::array<double, 2> mu{100.0, 100.0};

  auto *init = app.add_subcommand("init", "write the projected radial initialization");
  auto *opt = app.add_subcommand("optimize", "learn a trajectory and report before/after scores");
  auto *eval = app.add_subcommand("evaluate", "score a trajectory on the held-out phantoms or given images");
  auto *prof = app.add_subcommand("profiles", "export gradient and slew-rate profiles of a trajectory");
  auto *cmp = app.add_subcommand("compare", "projection versus penalty constraint handling");
  auto *uf = app.add_subcommand("uf", "undersampling factor of the configured acquisition");
  for (auto *s : {init, opt, eval, prof, cmp, uf}) {
    add_common(s, common);
  }
  for (auto *s : {eval, prof}) {
    s->add_option("--traj", traj, "trajectory file (.csv or binary); default: the run's final trajectory");
  }
  eval->add_option("--image", images, "grayscale PNG or KIMG images instead of the synthetic test set");
  cmp->add_option("--mu", mu, "penalty weights (speed, slew)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*init) {
      return cmd_init(common);
    }
    if (*opt) {
      return cmd_optimize(common);
    }
    if (*eval) {
      return cmd_evaluate(common, traj, images);
    }
    if (*prof) {
      return cmd_profiles(common, traj);
    }
    if (*cmp) {
      return cmd_compare(common, mu);
    }
    if (*uf) {
      return cmd_uf(common);
    }
  } catch (std::exception const &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
