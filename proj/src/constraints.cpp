#include "ktraj/constraints.hpp"
#include "ktraj/error.hpp"
#include "ktraj/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ktraj {

namespace {

using Block = Eigen::Matrix<double, Eigen::Dynamic, 2>;

Block first_diff(Block const &z)
{
  auto const n = z.rows();
  return z.bottomRows(n - 1) - z.topRows(n - 1);
}

Block second_diff(Block const &z)
{
  auto const n = z.rows();
  if (n < 3) {
    return Block(0, 2);
  }
  return z.bottomRows(n - 2) - 2.0 * z.middleRows(1, n - 2) + z.topRows(n - 2);
}

// Transposes of the difference operators.
void add_first_diff_t(Block const &u, Block &out)
{
  auto const m = u.rows();
  out.bottomRows(m) += u;
  out.topRows(m) -= u;
}

void add_second_diff_t(Block const &u, Block &out)
{
  auto const m = u.rows();
  out.topRows(m) += u;
  out.middleRows(1, m) -= 2.0 * u;
  out.bottomRows(m) += u;
}

double hinge_max(Block const &d, double bound)
{
  if (d.rows() == 0 || !std::isfinite(bound)) {
    return 0.0;
  }
  return std::max(0.0, d.rowwise().norm().maxCoeff() - bound);
}

// Group soft-threshold: prox of t*bound*||.|| applied row by row.
void shrink_rows(Block &u, double threshold)
{
  if (!std::isfinite(threshold)) {
    u.setZero();
    return;
  }
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double const nrm = u.row(i).norm();
    u.row(i) *= nrm > threshold ? 1.0 - threshold / nrm : 0.0;
  }
}

double violation(Block const &z, Bounds b, double box)
{
  double v = hinge_max(first_diff(z), b.speed);
  if (z.rows() >= 3) {
    v = std::max(v, hinge_max(second_diff(z), b.accel));
  }
  if (std::isfinite(box)) {
    v = std::max(v, z.cwiseAbs().maxCoeff() - box);
  }
  return v;
}

// u - t * clamp(u / t, -box, box), the prox step for the box indicator's conjugate.
void shrink_box(Block &u, double t, double box)
{
  u = u.array() - (u.array()).cwiseMax(-t * box).cwiseMin(t * box);
}

} // namespace

double stacked_difference_norm_sq(Eigen::Index n, int iters)
{
  if (n < 2) {
    return 0.0;
  }
  // Deterministic non-symmetric start so the top eigenvector is not missed.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = 1.0 + 0.37 * std::sin(1.3 * double(i) + 0.1) + (i % 2 ? 0.5 : -0.5);
  }
  v.normalize();
  double lambda = 0;
  for (int it = 0; it < iters; ++it) {
    Block z = Block::Zero(n, 2);
    z.col(0) = v;
    Block out = Block::Zero(n, 2);
    add_first_diff_t(first_diff(z), out);
    if (n >= 3) {
      add_second_diff_t(second_diff(z), out);
    }
    lambda = v.dot(out.col(0));
    double const nrm = out.col(0).norm();
    if (nrm == 0) {
      break;
    }
    v = out.col(0) / nrm;
  }
  return lambda;
}

ShotProjection project_shot(Shot const &shot, Bounds bounds, ProjectionOptions const &opt)
{
  auto const n = shot.rows();
  if (n < 2) {
    throw Error("project: need at least 2 samples per shot");
  }
  if (!(opt.tol > 0)) {
    throw Error("project: tol must be positive");
  }
  Block const k = shot;
  ShotProjection res;
  bool const boxed = std::isfinite(opt.box);
  res.violation = violation(k, bounds, opt.box);
  if (res.violation == 0.0) {
    res.point = shot;
    res.converged = true;
    return res;
  }

  // Power iteration underestimates the spectral norm slightly; pad it.
  double const lipschitz = 1.02 * (stacked_difference_norm_sq(n, opt.power_iters) + (boxed ? 1.0 : 0.0));
  double const step = 1.0 / lipschitz;

  // FISTA on the dual: minimize 1/2|k - A'u|^2 + sum_j b_j |u_j|, z = k - A'u.
  // The box contributes an identity block u3 with support function box*|u3|_1.
  Block u1 = Block::Zero(n - 1, 2), u2 = Block::Zero(std::max<Eigen::Index>(n - 2, 0), 2);
  Block u3 = Block::Zero(boxed ? n : 0, 2);
  Block y1 = u1, y2 = u2, y3 = u3;
  double t = 1.0;
  Block z = k;

  auto primal = [&](Block const &a1, Block const &a2, Block const &a3) {
    Block out = k;
    Block at = Block::Zero(n, 2);
    add_first_diff_t(a1, at);
    add_second_diff_t(a2, at);
    if (boxed) {
      at += a3;
    }
    out -= at;
    return out;
  };
  auto gap_of = [&](Block const &a1, Block const &a2, Block const &a3, Block const &zz) {
    // sum_j b_j|u_j| - <u_j, (Az)_j>; zero at the optimum.
    double g = 0;
    Block const d1 = first_diff(zz), d2 = second_diff(zz);
    if (std::isfinite(bounds.speed)) {
      g += bounds.speed * a1.rowwise().norm().sum();
    }
    if (std::isfinite(bounds.accel)) {
      g += bounds.accel * a2.rowwise().norm().sum();
    }
    g -= (a1.array() * d1.array()).sum() + (a2.array() * d2.array()).sum();
    if (boxed) {
      g += opt.box * a3.cwiseAbs().sum() - (a3.array() * zz.array()).sum();
    }
    return g;
  };

  double const scale = std::max(1.0, k.norm());
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Block const zy = primal(y1, y2, y3);
    Block n1 = y1 + step * first_diff(zy);
    Block n2 = y2 + step * second_diff(zy);
    shrink_rows(n1, step * bounds.speed);
    shrink_rows(n2, step * bounds.accel);
    Block n3 = u3;
    if (boxed) {
      n3 = y3 + step * zy;
      shrink_box(n3, step, opt.box);
    }

    // Gradient-based adaptive restart.
    double const restart = ((y1 - n1).array() * (n1 - u1).array()).sum() +
                           ((y2 - n2).array() * (n2 - u2).array()).sum() +
                           ((y3 - n3).array() * (n3 - u3).array()).sum();
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (restart > 0) {
      tn = 1.0;
      t = 1.0;
    }
    double const mom = (t - 1.0) / tn;
    y1 = n1 + mom * (n1 - u1);
    y2 = n2 + mom * (n2 - u2);
    y3 = n3 + mom * (n3 - u3);
    u1 = std::move(n1);
    u2 = std::move(n2);
    u3 = std::move(n3);
    t = tn;

    if ((it + 1) % 10 == 0 || it + 1 == opt.max_iter) {
      z = primal(u1, u2, u3);
      res.violation = violation(z, bounds, opt.box);
      res.gap = gap_of(u1, u2, u3, z);
      if (res.violation <= opt.tol && std::abs(res.gap) <= opt.tol * scale) {
        res.converged = true;
        ++it;
        break;
      }
    }
  }
  res.iterations = it;
  res.point = z;
  return res;
}

ProjectionResult project(Trajectory const &traj, Bounds bounds, ProjectionOptions const &opt)
{
  if (traj.n_samples() < 2) {
    throw Error("project: need at least 2 samples per shot");
  }
  Bounds const b = scaled_bounds(bounds, traj.decimation());
  ProjectionResult out;
  std::vector<Shot> shots;
  shots.reserve(traj.n_shots());
  for (auto const &s : traj.shots()) {
    auto r = project_shot(s, b, opt);
    out.converged = out.converged && r.converged;
    out.max_iterations = std::max(out.max_iterations, r.iterations);
    out.residual = std::max(out.residual, r.violation);
    shots.push_back(std::move(r.point));
  }
  out.trajectory = Trajectory(std::move(shots), traj.decimation());
  // Removes round-off excursions only; the box is already part of the projection.
  out.trajectory.clip_to_box();
  return out;
}

ProjectionResult project(Trajectory const &traj, HardwareSpec const &spec, ProjectionOptions const &opt)
{
  return project(traj, normalized_bounds(spec), opt);
}

FeasibilityReport check_feasibility(Trajectory const &traj, Bounds bounds, double activity_tol)
{
  if (traj.n_samples() < 3) {
    throw Error("check_feasibility: need at least 3 samples per shot");
  }
  if (!(activity_tol > 0 && activity_tol < 1)) {
    throw Error("check_feasibility: activity_tol must be in (0, 1)");
  }
  Bounds const b = scaled_bounds(bounds, traj.decimation());
  FeasibilityReport r;
  long speed_active = 0, slew_active = 0, speed_total = 0, slew_total = 0;
  for (auto const &s : traj.shots()) {
    Eigen::VectorXd const v = first_diff(s).rowwise().norm();
    Eigen::VectorXd const a = second_diff(s).rowwise().norm();
    for (double x : v) {
      r.max_speed_violation = std::max(r.max_speed_violation, x - b.speed);
      speed_active += x >= (1.0 - activity_tol) * b.speed;
    }
    for (double x : a) {
      r.max_accel_violation = std::max(r.max_accel_violation, x - b.accel);
      slew_active += x >= (1.0 - activity_tol) * b.accel;
    }
    speed_total += v.size();
    slew_total += a.size();
  }
  r.speed_active_fraction = speed_total ? double(speed_active) / double(speed_total) : 0.0;
  r.slew_active_fraction = slew_total ? double(slew_active) / double(slew_total) : 0.0;
  return r;
}

FeasibilityReport check_feasibility(Trajectory const &traj, HardwareSpec const &spec, double activity_tol)
{
  return check_feasibility(traj, normalized_bounds(spec), activity_tol);
}

} // namespace ktraj
