#include "ktraj/density.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

namespace ktraj {

namespace {

Eigen::VectorXd gram_magnitude(NufftPlan const &plan, DensityWeights const &w)
{
  return plan.forward(plan.adjoint(w.cast<Cx>())).cwiseAbs();
}

} // namespace

DensityWeights pipe_weights(NufftPlan const &plan, int iters)
{
  if (iters < 1) {
    throw Error("pipe_weights: iters must be >= 1");
  }
  auto const M = plan.n_samples();
  if (M == 0) {
    throw Error("pipe_weights: no sample locations");
  }
  DensityWeights w = DensityWeights::Constant(M, 1.0 / double(M));
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd const denom = gram_magnitude(plan, w);
    Eigen::Index worst = 0;
    if (denom.minCoeff(&worst) < 1e-14) {
      throw Error(fmt::format("pipe_weights: degenerate sampling pattern, |F F^H w| = {} at sample {} (iteration {})",
                              denom[worst], worst, it));
    }
    w = w.cwiseQuotient(denom);
  }
  return w;
}

DensityWeights pipe_weights(Locations const &locations, int N, int iters)
{
  return pipe_weights(NufftPlan(locations, N), iters);
}

double pipe_residual(NufftPlan const &plan, DensityWeights const &w)
{
  return (gram_magnitude(plan, w).array() - 1.0).abs().maxCoeff();
}

} // namespace ktraj
