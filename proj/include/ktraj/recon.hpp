#pragma once

#include "ktraj/nufft.hpp"

namespace ktraj {

/// x = F^H (w .* y)
ComplexImage dc_adjoint(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w);
ComplexImage dc_adjoint(KSpaceData const &y, DensityWeights const &w, int N);

struct CgResult
{
  ComplexImage image;
  std::vector<double> residuals; // weighted residual |sqrt(w) .* (F x - y)|, one per iterate incl. the start
};

/// Conjugate gradients on F^H W F x = F^H W y, started from dc_adjoint.
CgResult cg_least_squares(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w, int iters);
ComplexImage cg_least_squares(KSpaceData const &y, DensityWeights const &w, int N, int iters);

double weighted_residual(NufftPlan const &plan, ComplexImage const &x, Eigen::VectorXcd const &y,
                         DensityWeights const &w);

} // namespace ktraj
