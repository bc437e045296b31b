#pragma once

#include "ktraj/types.hpp"

namespace ktraj {

/// Exact non-uniform DFT between an N x N image and M arbitrary k-space locations:
///   y_m = sum_n x_n exp(-2 pi i k_m . r_n),  r_n in {-N/2, ..., N/2-1}^2.
/// The kernel is separable, so the plan caches the two M x N factor matrices and
/// evaluates every transform as dense matrix products.
class NufftPlan
{
public:
  NufftPlan(Locations locations, int N);

  [[nodiscard]] int image_size() const { return n_; }
  [[nodiscard]] Eigen::Index n_samples() const { return loc_.rows(); }
  [[nodiscard]] Locations const &locations() const { return loc_; }

  [[nodiscard]] Eigen::VectorXcd forward(ComplexImage const &x) const;
  [[nodiscard]] ComplexImage adjoint(Eigen::VectorXcd const &y) const;

  /// d Re<c, F(K) x> / d k_m, returned as M x 2.
  [[nodiscard]] Locations location_grad(ComplexImage const &x, Eigen::VectorXcd const &cotangent) const;

private:
  Locations loc_;
  int n_;
  Eigen::MatrixXcd ex_; // (m, col) -> exp(-2 pi i kx_m rx_col)
  Eigen::MatrixXcd ey_; // (m, row) -> exp(-2 pi i ky_m ry_row)
  Eigen::RowVectorXd r_; // centered pixel coordinates
};

KSpaceData nufft_forward(ComplexImage const &x, Locations const &locations);
ComplexImage nufft_adjoint(KSpaceData const &y, int N);
Locations nufft_location_grad(ComplexImage const &x, Locations const &locations, Eigen::VectorXcd const &cotangent);

/// Throws unless x is square with even side.
void check_image(ComplexImage const &x);

} // namespace ktraj
