#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ktraj {

using Cx = std::complex<double>;

// One shot: rows are time-ordered samples, columns are (kx, ky) in normalized
// k-space units (cycles/pixel, Nyquist box [-0.5, 0.5]).
using Shot = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Flattened sample locations, M x 2.
using Locations = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Images are stored row-major in the sense image(row, col) with row <-> ry and
// col <-> rx; pixel (row, col) sits at r = (col - N/2, row - N/2).
using ComplexImage = Eigen::MatrixXcd;
using RealImage = Eigen::MatrixXd;

using DensityWeights = Eigen::VectorXd;

struct KSpaceData
{
  Eigen::VectorXcd samples;
  Locations locations;
};

/// Scanner physics. All quantities in SI units.
struct HardwareSpec
{
  double gamma = 42.576e6; // Hz/T
  double g_max = 40e-3;    // T/m
  double s_max = 180.0;    // T/m/s
  double raster_dt = 10e-6;
  double dwell_dt = 2e-6;
  double fov = 0.23; // m
  int matrix_size = 320;

  /// Throws if any field is non-positive or raster_dt is not an integer multiple of dwell_dt.
  void validate() const;
  [[nodiscard]] double k_max() const { return matrix_size / (2.0 * fov); }
  [[nodiscard]] int dwell_ratio() const;
};

struct Bounds
{
  double speed; // alpha: max |first difference| per raster step
  double accel; // beta: max |second difference| per raster step^2
};

/// Nc shots of Ns points each. A decimation d > 1 means consecutive points are
/// d raster steps apart (coarse control points of the multi-resolution schedule).
class Trajectory
{
public:
  Trajectory() = default;
  Trajectory(int n_shots, int n_samples, int decimation = 1);
  explicit Trajectory(std::vector<Shot> shots, int decimation = 1);

  [[nodiscard]] int n_shots() const { return static_cast<int>(shots_.size()); }
  [[nodiscard]] int n_samples() const { return shots_.empty() ? 0 : static_cast<int>(shots_.front().rows()); }
  [[nodiscard]] int decimation() const { return decimation_; }
  [[nodiscard]] int size() const { return 2 * n_shots() * n_samples(); }

  Shot &shot(int c) { return shots_[c]; }
  [[nodiscard]] Shot const &shot(int c) const { return shots_[c]; }
  [[nodiscard]] std::vector<Shot> const &shots() const { return shots_; }

  // Shot-major flattening: (shot, sample, coordinate).
  [[nodiscard]] Eigen::VectorXd flatten() const;
  static Trajectory unflatten(Eigen::VectorXd const &v, int n_shots, int n_samples, int decimation = 1);

  /// All shots stacked into one M x 2 location list, shot-major.
  [[nodiscard]] Locations locations() const;

  [[nodiscard]] bool in_nyquist_box() const;
  void clip_to_box();

  Trajectory &operator+=(Trajectory const &other);
  Trajectory &operator*=(double s);
  friend Trajectory operator+(Trajectory a, Trajectory const &b) { return a += b; }
  friend Trajectory operator-(Trajectory a, Trajectory const &b) { return a += b * -1.0; }
  friend Trajectory operator*(Trajectory a, double s) { return a *= s; }
  friend Trajectory operator*(double s, Trajectory a) { return a *= s; }

  [[nodiscard]] double norm() const;
  friend bool operator==(Trajectory const &a, Trajectory const &b);

private:
  std::vector<Shot> shots_;
  int decimation_ = 1;
};

} // namespace ktraj
