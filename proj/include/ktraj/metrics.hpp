#pragma once

#include "ktraj/types.hpp"

#include <optional>

namespace ktraj {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrCap = 1e9;

/// 10 log10(peak^2 / MSE), peak = max |xref|, MSE over complex differences.
double psnr(ComplexImage const &xhat, ComplexImage const &xref);

struct SsimOptions
{
  int window = 7;
  double k1 = 0.01;
  double k2 = 0.03;
  // Dynamic range L. Unset means max - min of |xref|, falling back to max |xref|
  // and then 1 for flat references.
  std::optional<double> data_range;
};

/// Mean structural similarity of |xhat| and |xref| over every fully contained
/// window x window uniform window (population statistics).
double ssim(ComplexImage const &xhat, ComplexImage const &xref, SsimOptions const &opt = {});
double ssim(RealImage const &a, RealImage const &b, SsimOptions const &opt = {});

double ssim_data_range(RealImage const &ref);

struct LossWeights
{
  double l1 = 1.0;
  double l2 = 1.0;
  double ssim = 1.0;
};

/// l1 * mean|d| + l2 * mean|d|^2 + ssim * (1 - MSSIM(|xhat|, |xref|)), d = xhat - xref.
double combined_loss(ComplexImage const &xhat, ComplexImage const &xref, LossWeights const &weights,
                     SsimOptions const &opt = {});

/// Huber width used to smooth |d| in the L1 gradient.
inline constexpr double kHuberDelta = 1e-6;

/// dL/d conj(xhat) (Wirtinger), so that dL = 2 Re sum conj(g) dxhat. The L1 term
/// is differentiated through its Huber smoothing.
ComplexImage loss_grad_image(ComplexImage const &xhat, ComplexImage const &xref, LossWeights const &weights,
                             SsimOptions const &opt = {});

} // namespace ktraj
