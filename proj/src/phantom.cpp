#include "ktraj/phantom.hpp"
#include "ktraj/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ktraj {

std::array<Ellipse, 10> shepp_logan_ellipses()
{
  return {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  }};
}

RealImage rasterize_ellipses(int N, std::span<Ellipse const> ellipses)
{
  RealImage img = RealImage::Zero(N, N);
  double const half = N / 2.0;
  for (auto const &e : ellipses) {
    // sin is evaluated on |phi| so mirrored ellipses rasterize exactly mirrored.
    double const rad = std::abs(e.phi) * std::numbers::pi / 180.0;
    double const c = std::cos(rad);
    double const s = std::copysign(std::sin(rad), e.phi);
    for (int row = 0; row < N; ++row) {
      double const y = (half - row - 0.5) / half;
      for (int col = 0; col < N; ++col) {
        double const x = (col + 0.5 - half) / half;
        double const dx = x - e.x0, dy = y - e.y0;
        double const u = dx * c + dy * s;
        double const v = -dx * s + dy * c;
        if ((u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0) {
          img(row, col) += e.intensity;
        }
      }
    }
  }
  return img.cwiseMax(0.0).cwiseMin(1.0);
}

RealImage shepp_logan(int N, std::optional<std::uint64_t> perturb_seed)
{
  if (N < 16 || N % 2 != 0) {
    throw Error("shepp_logan: N must be even and >= 16");
  }
  auto ellipses = shepp_logan_ellipses();
  if (perturb_seed) {
    std::mt19937_64 rng(*perturb_seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (auto &e : ellipses) {
      // Centers move by up to 5% of the half-width, axes by 5% relative, angles by 5% of 180 degrees.
      e.x0 += jitter(rng);
      e.y0 += jitter(rng);
      e.a *= 1.0 + jitter(rng);
      e.b *= 1.0 + jitter(rng);
      e.phi += 180.0 * jitter(rng);
    }
  }
  return rasterize_ellipses(N, ellipses);
}

ComplexImage synth_phase(RealImage const &mag, double smoothness, std::uint64_t seed)
{
  if (!(smoothness > 0)) {
    throw Error("synth_phase: smoothness must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::array<double, 6> p{};
  for (auto &v : p) {
    v = coef(rng);
  }
  Eigen::Index const rows = mag.rows(), cols = mag.cols();
  RealImage phi(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double const v = rows > 1 ? 2.0 * double(r) / double(rows - 1) - 1.0 : 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      double const u = cols > 1 ? 2.0 * double(c) / double(cols - 1) - 1.0 : 0.0;
      phi(r, c) = p[0] + p[1] * u + p[2] * v + p[3] * u * u + p[4] * u * v + p[5] * v * v;
    }
  }
  double const peak = phi.cwiseAbs().maxCoeff();
  if (peak > 0) {
    phi *= std::numbers::pi * smoothness / peak;
  }
  ComplexImage x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = mag(i) * Cx(std::cos(phi(i)), std::sin(phi(i)));
  }
  return x;
}

std::vector<ComplexImage> phantom_dataset(int N, int n, std::uint64_t base_seed, double phase_smoothness)
{
  std::vector<ComplexImage> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::uint64_t const seed = base_seed + std::uint64_t(i);
    // The phase seed is decorrelated from the geometry seed.
    out.push_back(synth_phase(shepp_logan(N, seed), phase_smoothness, seed ^ 0x9e3779b97f4a7c15ULL));
  }
  return out;
}

} // namespace ktraj
