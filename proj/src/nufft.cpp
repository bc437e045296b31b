#include "ktraj/nufft.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

#include <numbers>

namespace ktraj {

void check_image(ComplexImage const &x)
{
  if (x.rows() != x.cols() || x.rows() % 2 != 0 || x.rows() == 0) {
    throw Error(fmt::format("image must be square with even side, got {}x{}", x.rows(), x.cols()));
  }
}

NufftPlan::NufftPlan(Locations locations, int N)
  : loc_(std::move(locations))
  , n_(N)
{
  if (N <= 0 || N % 2 != 0) {
    throw Error(fmt::format("NUFFT: image size must be positive and even, got {}", N));
  }
  r_.resize(N);
  for (int j = 0; j < N; ++j) {
    r_[j] = j - N / 2;
  }
  auto const M = loc_.rows();
  ex_.resize(M, N);
  ey_.resize(M, N);
  double const two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index m = 0; m < M; ++m) {
    for (int j = 0; j < N; ++j) {
      ex_(m, j) = std::polar(1.0, -two_pi * loc_(m, 0) * r_[j]);
      ey_(m, j) = std::polar(1.0, -two_pi * loc_(m, 1) * r_[j]);
    }
  }
}

Eigen::VectorXcd NufftPlan::forward(ComplexImage const &x) const
{
  if (x.rows() != n_ || x.cols() != n_) {
    throw Error("NUFFT forward: image size does not match plan");
  }
  Eigen::MatrixXcd const t = ey_ * x;
  return t.cwiseProduct(ex_).rowwise().sum();
}

ComplexImage NufftPlan::adjoint(Eigen::VectorXcd const &y) const
{
  if (y.size() != loc_.rows()) {
    throw Error("NUFFT adjoint: sample count does not match plan");
  }
  Eigen::MatrixXcd const weighted = y.asDiagonal() * ex_.conjugate();
  return ey_.adjoint() * weighted;
}

Locations NufftPlan::location_grad(ComplexImage const &x, Eigen::VectorXcd const &cotangent) const
{
  if (x.rows() != n_ || x.cols() != n_ || cotangent.size() != loc_.rows()) {
    throw Error("NUFFT location gradient: shape mismatch");
  }
  Cx const minus_two_pi_i(0.0, -2.0 * std::numbers::pi);
  Eigen::MatrixXcd const t = ey_ * x;
  Eigen::VectorXcd const dx = t.cwiseProduct(ex_ * r_.cast<Cx>().asDiagonal()).rowwise().sum();
  Eigen::MatrixXcd const ty = (ey_ * r_.cast<Cx>().asDiagonal()) * x;
  Eigen::VectorXcd const dy = ty.cwiseProduct(ex_).rowwise().sum();

  Locations g(loc_.rows(), 2);
  for (Eigen::Index m = 0; m < loc_.rows(); ++m) {
    Cx const c = std::conj(cotangent[m]) * minus_two_pi_i;
    g(m, 0) = (c * dx[m]).real();
    g(m, 1) = (c * dy[m]).real();
  }
  return g;
}

KSpaceData nufft_forward(ComplexImage const &x, Locations const &locations)
{
  check_image(x);
  NufftPlan const plan(locations, static_cast<int>(x.rows()));
  return {plan.forward(x), locations};
}

ComplexImage nufft_adjoint(KSpaceData const &y, int N)
{
  if (y.samples.size() != y.locations.rows()) {
    throw Error("NUFFT adjoint: samples and locations differ in length");
  }
  return NufftPlan(y.locations, N).adjoint(y.samples);
}

Locations nufft_location_grad(ComplexImage const &x, Locations const &locations, Eigen::VectorXcd const &cotangent)
{
  check_image(x);
  return NufftPlan(locations, static_cast<int>(x.rows())).location_grad(x, cotangent);
}

} // namespace ktraj
