#include "ktraj/interp.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

namespace ktraj {

namespace {

bool is_pow2(int v)
{
  return v > 0 && (v & (v - 1)) == 0;
}

} // namespace

Shot upsample_linear(Shot const &control, int factor)
{
  if (factor < 1) {
    throw Error("upsample_linear: factor must be >= 1");
  }
  auto const ns = control.rows();
  if (factor == 1 || ns == 0) {
    return control;
  }
  Shot out((ns - 1) * factor + 1, 2);
  for (Eigen::Index i = 0; i + 1 < ns; ++i) {
    for (int s = 0; s < factor; ++s) {
      double const lam = double(s) / factor;
      out.row(i * factor + s) = (1.0 - lam) * control.row(i) + lam * control.row(i + 1);
    }
  }
  out.row(out.rows() - 1) = control.row(ns - 1);
  return out;
}

Trajectory upsample_linear(Trajectory const &control, int factor)
{
  std::vector<Shot> shots;
  shots.reserve(control.n_shots());
  for (auto const &s : control.shots()) {
    shots.push_back(upsample_linear(s, factor));
  }
  int const d = control.decimation() % factor == 0 ? control.decimation() / factor : 1;
  return Trajectory(std::move(shots), d);
}

Shot upsample_adjoint(Shot const &grad_full, int factor)
{
  if (factor < 1) {
    throw Error("upsample_adjoint: factor must be >= 1");
  }
  if (factor == 1) {
    return grad_full;
  }
  auto const nf = grad_full.rows();
  if (nf < 1 || (nf - 1) % factor != 0) {
    throw Error(fmt::format("upsample_adjoint: length {} is not (Ns-1)*{}+1 for any Ns", nf, factor));
  }
  auto const ns = (nf - 1) / factor + 1;
  Shot out = Shot::Zero(ns, 2);
  for (Eigen::Index i = 0; i + 1 < ns; ++i) {
    for (int s = 0; s < factor; ++s) {
      double const lam = double(s) / factor;
      out.row(i) += (1.0 - lam) * grad_full.row(i * factor + s);
      out.row(i + 1) += lam * grad_full.row(i * factor + s);
    }
  }
  out.row(ns - 1) += grad_full.row(nf - 1);
  return out;
}

Trajectory upsample_adjoint(Trajectory const &grad_full, int factor)
{
  std::vector<Shot> shots;
  shots.reserve(grad_full.n_shots());
  for (auto const &s : grad_full.shots()) {
    shots.push_back(upsample_adjoint(s, factor));
  }
  return Trajectory(std::move(shots), grad_full.decimation() * factor);
}

Trajectory change_resolution(Trajectory const &control, int new_decimation)
{
  int const old_d = control.decimation();
  if (!is_pow2(old_d) || !is_pow2(new_decimation)) {
    throw Error("change_resolution: decimations must be powers of two");
  }
  if (new_decimation == old_d) {
    return control;
  }
  if (new_decimation < old_d) {
    auto out = upsample_linear(control, old_d / new_decimation);
    return Trajectory(out.shots(), new_decimation);
  }
  int const ratio = new_decimation / old_d;
  auto const ns = control.n_samples();
  if ((ns - 1) % ratio != 0) {
    throw Error(fmt::format("change_resolution: {} samples cannot be coarsened by {}", ns, ratio));
  }
  std::vector<Shot> shots;
  for (auto const &s : control.shots()) {
    Shot c((ns - 1) / ratio + 1, 2);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      c.row(i) = s.row(i * ratio);
    }
    shots.push_back(std::move(c));
  }
  return Trajectory(std::move(shots), new_decimation);
}

Locations dwell_locations(Trajectory const &control, int dwell_ratio, bool match_raster_count)
{
  if (dwell_ratio < 1) {
    throw Error("dwell_locations: dwell_ratio must be >= 1");
  }
  int const factor = control.decimation() * dwell_ratio;
  Eigen::Index const per_shot = Eigen::Index(control.n_samples() - 1) * factor + 1;
  Eigen::Index const raster = Eigen::Index(control.n_samples() - 1) * control.decimation() + 1;
  Eigen::Index const out_per_shot = match_raster_count ? raster * dwell_ratio : per_shot;
  Locations loc(out_per_shot * control.n_shots(), 2);
  for (int c = 0; c < control.n_shots(); ++c) {
    Shot const fine = upsample_linear(control.shot(c), factor);
    auto block = loc.middleRows(c * out_per_shot, out_per_shot);
    block.topRows(per_shot) = fine;
    for (Eigen::Index p = per_shot; p < out_per_shot; ++p) {
      block.row(p) = fine.row(per_shot - 1);
    }
  }
  return loc;
}

} // namespace ktraj
