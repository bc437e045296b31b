#include "ktraj/error.hpp"
#include "ktraj/interp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ktraj;

namespace {

Shot random_shot(std::mt19937_64 &rng, int n)
{
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  Shot s(n, 2);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s(i) = d(rng);
  }
  return s;
}

// Explicit interpolation matrix, built entry by entry.
Eigen::MatrixXd interp_matrix(int ns, int factor)
{
  int const out = (ns - 1) * factor + 1;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(out, ns);
  for (int p = 0; p < out; ++p) {
    int const i = std::min(p / factor, ns - 2);
    double const lam = double(p - i * factor) / factor;
    S(p, i) += 1.0 - lam;
    S(p, i + 1) += lam;
  }
  return S;
}

} // namespace

TEST_CASE("upsample_linear")
{
  std::mt19937_64 rng(11);

  SECTION("factor 1 is the identity")
  {
    Shot const s = random_shot(rng, 7);
    CHECK(upsample_linear(s, 1) == s);
  }

  SECTION("factor 4 on a segment")
  {
    Shot s(2, 2);
    s << 0.0, 0.0, 0.4, 0.0;
    Shot const u = upsample_linear(s, 4);
    REQUIRE(u.rows() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(u(i, 0) == Catch::Approx(0.1 * i).margin(1e-15));
      CHECK(u(i, 1) == 0.0);
    }
  }

  SECTION("convex-combination oracle, factor 5")
  {
    Shot const s = random_shot(rng, 9);
    Shot const u = upsample_linear(s, 5);
    REQUIRE(u.rows() == 41);
    for (int i = 0; i + 1 < 9; ++i) {
      for (int j = 0; j < 5; ++j) {
        double const lam = j / 5.0;
        Eigen::RowVector2d const ref = (1 - lam) * s.row(i) + lam * s.row(i + 1);
        CHECK((u.row(5 * i + j) - ref).norm() <= 1e-15);
      }
    }
    CHECK(u.row(0) == s.row(0));
    CHECK(u.row(40) == s.row(8));
  }

  SECTION("matches the explicit matrix")
  {
    Shot const s = random_shot(rng, 6);
    Shot const u = upsample_linear(s, 3);
    CHECK((u - interp_matrix(6, 3) * s).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SECTION("affine equivariance")
  {
    Shot const s = random_shot(rng, 5);
    Eigen::Matrix2d A;
    A << 0.3, -1.2, 0.7, 0.9;
    Eigen::RowVector2d const b(0.05, -0.2);
    auto affine = [&](Shot const &x) {
      Shot y = x * A.transpose();
      y.rowwise() += b;
      return y;
    };
    CHECK((upsample_linear(affine(s), 4) - affine(upsample_linear(s, 4))).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SECTION("interpolated points stay on their parent segment")
  {
    Shot const s = random_shot(rng, 8);
    Shot const u = upsample_linear(s, 6);
    for (int i = 0; i + 1 < 8; ++i) {
      Eigen::RowVector2d const a = s.row(i), b = s.row(i + 1);
      double const len = (b - a).norm();
      for (int j = 0; j <= 6; ++j) {
        Eigen::RowVector2d const p = u.row(6 * i + j);
        CHECK((p - a).norm() + (b - p).norm() <= len + 1e-14);
      }
    }
  }

  SECTION("trajectory decimation bookkeeping")
  {
    Trajectory t(std::vector<Shot>{random_shot(rng, 5), random_shot(rng, 5)}, 4);
    Trajectory const u = upsample_linear(t, 2);
    CHECK(u.n_samples() == 9);
    CHECK(u.decimation() == 2);
    CHECK(upsample_linear(t, 8).decimation() == 1);
  }

  SECTION("bad factor")
  {
    CHECK_THROWS_AS(upsample_linear(random_shot(rng, 4), 0), Error);
  }
}

TEST_CASE("upsample_adjoint")
{
  std::mt19937_64 rng(12);

  SECTION("factor 1 is the identity")
  {
    Shot const g = random_shot(rng, 5);
    CHECK(upsample_adjoint(g, 1) == g);
  }

  SECTION("all-ones gradient, factor 2, three control points")
  {
    Shot const g = Shot::Ones(5, 2);
    Shot const c = upsample_adjoint(g, 2);
    REQUIRE(c.rows() == 3);
    for (int d = 0; d < 2; ++d) {
      CHECK(c(0, d) == Catch::Approx(1.5));
      CHECK(c(1, d) == Catch::Approx(2.0));
      CHECK(c(2, d) == Catch::Approx(1.5));
    }
  }

  SECTION("inner-product adjointness")
  {
    for (int trial = 0; trial < 10; ++trial) {
      int const ns = 3 + trial, f = 1 + trial % 5;
      Shot const k = random_shot(rng, ns);
      Shot const g = random_shot(rng, (ns - 1) * f + 1);
      double const lhs = (upsample_linear(k, f).array() * g.array()).sum();
      double const rhs = (k.array() * upsample_adjoint(g, f).array()).sum();
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }

  SECTION("equals the matrix transpose")
  {
    Shot const g = random_shot(rng, 13);
    CHECK((upsample_adjoint(g, 4) - interp_matrix(4, 4).transpose() * g).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SECTION("inconsistent length rejected")
  {
    CHECK_THROWS_AS(upsample_adjoint(random_shot(rng, 6), 2), Error);
  }
}

TEST_CASE("change_resolution")
{
  std::mt19937_64 rng(13);
  Trajectory const t(std::vector<Shot>{random_shot(rng, 3), random_shot(rng, 3)}, 4);

  SECTION("same decimation")
  {
    CHECK(change_resolution(t, 4) == t);
  }

  SECTION("refine then coarsen is bit-identical")
  {
    Trajectory const fine = change_resolution(t, 2);
    CHECK(fine.n_samples() == 5);
    CHECK(fine.decimation() == 2);
    Trajectory const back = change_resolution(fine, 4);
    CHECK(back == t);
    CHECK(change_resolution(change_resolution(t, 1), 4) == t);
  }

  SECTION("coarsening subsamples")
  {
    Trajectory const fine(std::vector<Shot>{random_shot(rng, 9)}, 1);
    Trajectory const c = change_resolution(fine, 4);
    REQUIRE(c.n_samples() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(c.shot(0).row(i) == fine.shot(0).row(4 * i));
    }
  }

  SECTION("incompatible requests rejected")
  {
    CHECK_THROWS_AS(change_resolution(t, 3), Error);
    CHECK_THROWS_AS(change_resolution(t, 16), Error); // 2 intervals cannot be coarsened by 4
    CHECK_THROWS_AS(change_resolution(t, 0), Error);
  }
}

TEST_CASE("dwell_locations")
{
  std::mt19937_64 rng(14);
  Trajectory const t(std::vector<Shot>{random_shot(rng, 5), random_shot(rng, 5)}, 2);

  Locations const loc = dwell_locations(t, 3);
  CHECK(loc.rows() == 2 * (4 * 6 + 1));
  CHECK(loc.topRows(25) == upsample_linear(t.shot(0), 6));

  Trajectory const raster = change_resolution(t, 1);
  Locations const padded = dwell_locations(raster, 3, true);
  REQUIRE(padded.rows() == 2 * 9 * 3);
  CHECK(padded.topRows(25) == upsample_linear(raster.shot(0), 3));
  CHECK(padded.row(25) == raster.shot(0).row(8));
  CHECK(padded.row(26) == raster.shot(0).row(8));
}
