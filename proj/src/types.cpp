#include "ktraj/types.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ktraj {

void HardwareSpec::validate() const
{
  if (!(gamma > 0) || !(g_max > 0) || !(s_max > 0) || !(raster_dt > 0) || !(dwell_dt > 0) || !(fov > 0) ||
      matrix_size <= 0) {
    throw Error("HardwareSpec: all fields must be strictly positive");
  }
  double const ratio = raster_dt / dwell_dt;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
    throw Error(fmt::format("HardwareSpec: raster_dt {} is not an integer multiple of dwell_dt {}", raster_dt, dwell_dt));
  }
}

int HardwareSpec::dwell_ratio() const
{
  return static_cast<int>(std::lround(raster_dt / dwell_dt));
}

Trajectory::Trajectory(int n_shots, int n_samples, int decimation)
  : shots_(n_shots, Shot::Zero(n_samples, 2))
  , decimation_(decimation)
{
  if (n_shots < 0 || n_samples < 0 || decimation < 1) {
    throw Error("Trajectory: invalid dimensions");
  }
}

Trajectory::Trajectory(std::vector<Shot> shots, int decimation)
  : shots_(std::move(shots))
  , decimation_(decimation)
{
  if (decimation < 1) {
    throw Error("Trajectory: decimation must be >= 1");
  }
  for (auto const &s : shots_) {
    if (s.rows() != shots_.front().rows()) {
      throw Error("Trajectory: all shots must have the same number of samples");
    }
  }
}

Eigen::VectorXd Trajectory::flatten() const
{
  Eigen::VectorXd v(size());
  Eigen::Index i = 0;
  for (auto const &s : shots_) {
    for (Eigen::Index p = 0; p < s.rows(); ++p) {
      v[i++] = s(p, 0);
      v[i++] = s(p, 1);
    }
  }
  return v;
}

Trajectory Trajectory::unflatten(Eigen::VectorXd const &v, int n_shots, int n_samples, int decimation)
{
  if (v.size() != 2 * n_shots * n_samples) {
    throw Error("Trajectory::unflatten: size mismatch");
  }
  Trajectory t(n_shots, n_samples, decimation);
  Eigen::Index i = 0;
  for (auto &s : t.shots_) {
    for (Eigen::Index p = 0; p < s.rows(); ++p) {
      s(p, 0) = v[i++];
      s(p, 1) = v[i++];
    }
  }
  return t;
}

Locations Trajectory::locations() const
{
  Locations loc(static_cast<Eigen::Index>(n_shots()) * n_samples(), 2);
  Eigen::Index row = 0;
  for (auto const &s : shots_) {
    loc.middleRows(row, s.rows()) = s;
    row += s.rows();
  }
  return loc;
}

bool Trajectory::in_nyquist_box() const
{
  for (auto const &s : shots_) {
    if (s.size() && s.cwiseAbs().maxCoeff() > 0.5) {
      return false;
    }
  }
  return true;
}

void Trajectory::clip_to_box()
{
  for (auto &s : shots_) {
    s = s.cwiseMax(-0.5).cwiseMin(0.5);
  }
}

Trajectory &Trajectory::operator+=(Trajectory const &other)
{
  if (other.n_shots() != n_shots() || other.n_samples() != n_samples()) {
    throw Error("Trajectory: shape mismatch");
  }
  for (int c = 0; c < n_shots(); ++c) {
    shots_[c] += other.shots_[c];
  }
  return *this;
}

Trajectory &Trajectory::operator*=(double s)
{
  for (auto &shot : shots_) {
    shot *= s;
  }
  return *this;
}

double Trajectory::norm() const
{
  double sq = 0;
  for (auto const &s : shots_) {
    sq += s.squaredNorm();
  }
  return std::sqrt(sq);
}

bool operator==(Trajectory const &a, Trajectory const &b)
{
  if (a.decimation_ != b.decimation_ || a.shots_.size() != b.shots_.size()) {
    return false;
  }
  for (size_t c = 0; c < a.shots_.size(); ++c) {
    if (a.shots_[c].rows() != b.shots_[c].rows() || a.shots_[c] != b.shots_[c]) {
      return false;
    }
  }
  return true;
}

} // namespace ktraj
