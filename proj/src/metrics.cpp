#include "ktraj/metrics.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ktraj {

namespace {

void check_same_shape(ComplexImage const &a, ComplexImage const &b, char const *what)
{
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0) {
    throw Error(fmt::format("{}: images must be non-empty and of equal shape", what));
  }
}

struct WindowStats
{
  double mu_a, mu_b, var_a, var_b, cov;
};

WindowStats window_stats(RealImage const &a, RealImage const &b, Eigen::Index r0, Eigen::Index c0, int w)
{
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (Eigen::Index c = c0; c < c0 + w; ++c) {
    for (Eigen::Index r = r0; r < r0 + w; ++r) {
      double const x = a(r, c), y = b(r, c);
      sa += x;
      sb += y;
      saa += x * x;
      sbb += y * y;
      sab += x * y;
    }
  }
  double const n = double(w) * w;
  WindowStats s;
  s.mu_a = sa / n;
  s.mu_b = sb / n;
  s.var_a = saa / n - s.mu_a * s.mu_a;
  s.var_b = sbb / n - s.mu_b * s.mu_b;
  s.cov = sab / n - s.mu_a * s.mu_b;
  return s;
}

void check_window(RealImage const &a, RealImage const &b, SsimOptions const &opt)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("ssim: images differ in shape");
  }
  if (opt.window < 3 || opt.window % 2 == 0) {
    throw Error(fmt::format("ssim: window must be odd and >= 3, got {}", opt.window));
  }
  if (a.rows() < opt.window || a.cols() < opt.window) {
    throw Error("ssim: image smaller than window");
  }
}

// SSIM with its gradient w.r.t. `a` (the estimate), accumulated into grad_a when non-null.
double mssim_impl(RealImage const &a, RealImage const &b, SsimOptions const &opt, RealImage *grad_a)
{
  check_window(a, b, opt);
  double const L = opt.data_range ? *opt.data_range : ssim_data_range(b);
  double const C1 = (opt.k1 * L) * (opt.k1 * L);
  double const C2 = (opt.k2 * L) * (opt.k2 * L);
  int const w = opt.window;
  double const n = double(w) * w;
  Eigen::Index const nr = a.rows() - w + 1, nc = a.cols() - w + 1;
  double const n_windows = double(nr) * double(nc);
  if (grad_a) {
    grad_a->setZero(a.rows(), a.cols());
  }
  double total = 0;
  for (Eigen::Index c0 = 0; c0 < nc; ++c0) {
    for (Eigen::Index r0 = 0; r0 < nr; ++r0) {
      auto const s = window_stats(a, b, r0, c0, w);
      double const A1 = 2 * s.mu_a * s.mu_b + C1;
      double const A2 = 2 * s.cov + C2;
      double const B1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + C1;
      double const B2 = s.var_a + s.var_b + C2;
      double const S = (A1 * A2) / (B1 * B2);
      total += S;
      if (grad_a) {
        // dS/da_p = k0 + k1 a_p + k2 b_p for every p in the window.
        double const k1 = -2.0 * S / (n * B2);
        double const k2 = 2.0 * A1 / (n * B1 * B2);
        double const k0 = 2.0 * s.mu_b * A2 / (n * B1 * B2) - 2.0 * A1 * s.mu_b / (n * B1 * B2) -
                          2.0 * S * s.mu_a / (n * B1) + 2.0 * S * s.mu_a / (n * B2);
        for (Eigen::Index c = c0; c < c0 + w; ++c) {
          for (Eigen::Index r = r0; r < r0 + w; ++r) {
            (*grad_a)(r, c) += (k0 + k1 * a(r, c) + k2 * b(r, c)) / n_windows;
          }
        }
      }
    }
  }
  return total / n_windows;
}

} // namespace

double psnr(ComplexImage const &xhat, ComplexImage const &xref)
{
  check_same_shape(xhat, xref, "psnr");
  double const peak = xref.cwiseAbs().maxCoeff();
  if (peak == 0) {
    throw Error("psnr: reference image is identically zero");
  }
  double const mse = (xhat - xref).cwiseAbs2().mean();
  if (mse == 0) {
    return kPsnrCap;
  }
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim_data_range(RealImage const &ref)
{
  double const hi = ref.maxCoeff(), lo = ref.minCoeff();
  if (hi > lo) {
    return hi - lo;
  }
  return hi > 0 ? hi : 1.0;
}

double ssim(RealImage const &a, RealImage const &b, SsimOptions const &opt)
{
  return mssim_impl(a, b, opt, nullptr);
}

double ssim(ComplexImage const &xhat, ComplexImage const &xref, SsimOptions const &opt)
{
  check_same_shape(xhat, xref, "ssim");
  return mssim_impl(xhat.cwiseAbs(), xref.cwiseAbs(), opt, nullptr);
}

double combined_loss(ComplexImage const &xhat, ComplexImage const &xref, LossWeights const &weights,
                     SsimOptions const &opt)
{
  check_same_shape(xhat, xref, "combined_loss");
  if (weights.l1 < 0 || weights.l2 < 0 || weights.ssim < 0) {
    throw Error("combined_loss: weights must be nonnegative");
  }
  Eigen::ArrayXXd const mag = (xhat - xref).cwiseAbs().array();
  double loss = weights.l1 * mag.mean() + weights.l2 * mag.square().mean();
  if (weights.ssim != 0) {
    loss += weights.ssim * (1.0 - ssim(xhat, xref, opt));
  }
  return loss;
}

ComplexImage loss_grad_image(ComplexImage const &xhat, ComplexImage const &xref, LossWeights const &weights,
                             SsimOptions const &opt)
{
  check_same_shape(xhat, xref, "loss_grad_image");
  double const n = double(xhat.size());
  ComplexImage const d = xhat - xref;
  ComplexImage g = (weights.l2 / n) * d;
  if (weights.l1 != 0) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      double const m = std::abs(d(i));
      Cx const dh = m <= kHuberDelta ? d(i) / (2.0 * kHuberDelta) : d(i) / (2.0 * m);
      g(i) += (weights.l1 / n) * dh;
    }
  }
  if (weights.ssim != 0) {
    RealImage const a = xhat.cwiseAbs();
    RealImage da;
    mssim_impl(a, xref.cwiseAbs(), opt, &da);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (a(i) > 0) {
        g(i) -= weights.ssim * da(i) * xhat(i) / (2.0 * a(i));
      }
    }
  }
  return g;
}

} // namespace ktraj
