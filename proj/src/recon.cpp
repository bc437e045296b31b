#include "ktraj/recon.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ktraj {

ComplexImage dc_adjoint(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w)
{
  if (y.size() != w.size()) {
    throw Error("dc_adjoint: data and weights differ in length");
  }
  return plan.adjoint(y.cwiseProduct(w.cast<Cx>()));
}

ComplexImage dc_adjoint(KSpaceData const &y, DensityWeights const &w, int N)
{
  return dc_adjoint(NufftPlan(y.locations, N), y.samples, w);
}

double weighted_residual(NufftPlan const &plan, ComplexImage const &x, Eigen::VectorXcd const &y,
                         DensityWeights const &w)
{
  return ((plan.forward(x) - y).array() * w.cwiseSqrt().cast<Cx>().array()).matrix().norm();
}

CgResult cg_least_squares(NufftPlan const &plan, Eigen::VectorXcd const &y, DensityWeights const &w, int iters)
{
  if (iters < 1) {
    throw Error("cg_least_squares: iters must be >= 1");
  }
  Eigen::VectorXcd const wc = w.cast<Cx>();
  auto normal = [&](ComplexImage const &v) -> ComplexImage { return plan.adjoint(plan.forward(v).cwiseProduct(wc)); };

  CgResult out;
  ComplexImage x = dc_adjoint(plan, y, w);
  ComplexImage r = x - normal(x); // b - A x with b = F^H W y = x0
  ComplexImage p = r;
  double rs = r.squaredNorm();
  double const b_norm = x.squaredNorm();
  out.residuals.push_back(weighted_residual(plan, x, y, w));
  for (int it = 0; it < iters; ++it) {
    if (rs <= 1e-30 * std::max(b_norm, 1e-300)) {
      break;
    }
    ComplexImage const q = normal(p);
    double const pq = (p.conjugate().cwiseProduct(q)).sum().real();
    if (!std::isfinite(pq) || !std::isfinite(rs)) {
      throw Error(fmt::format("cg_least_squares: non-finite value at iteration {}", it));
    }
    if (pq <= 0) {
      break;
    }
    double const alpha = rs / pq;
    x += alpha * p;
    r -= alpha * q;
    double const rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
    out.residuals.push_back(weighted_residual(plan, x, y, w));
  }
  if (!x.allFinite()) {
    throw Error("cg_least_squares: reconstruction contains NaN");
  }
  out.image = std::move(x);
  return out;
}

ComplexImage cg_least_squares(KSpaceData const &y, DensityWeights const &w, int N, int iters)
{
  return cg_least_squares(NufftPlan(y.locations, N), y.samples, w, iters).image;
}

} // namespace ktraj
