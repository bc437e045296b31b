#include "ktraj/error.hpp"
#include "ktraj/kinematics.hpp"
#include "ktraj/traj_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>
#include <sstream>

using namespace ktraj;
using Catch::Approx;

namespace {

HardwareSpec reference_hardware()
{
  HardwareSpec s;
  s.gamma = 42.576e6;
  s.g_max = 0.04;
  s.s_max = 180;
  s.raster_dt = 1e-5;
  s.dwell_dt = 2e-6;
  s.fov = 0.23;
  s.matrix_size = 320;
  return s;
}

Trajectory random_traj(std::mt19937_64 &rng, int nc, int ns)
{
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Trajectory t(nc, ns);
  for (int c = 0; c < nc; ++c) {
    for (Eigen::Index i = 0; i < t.shot(c).size(); ++i) {
      t.shot(c)(i) = u(rng);
    }
  }
  return t;
}

} // namespace

TEST_CASE("normalized bounds", "[kinematics]")
{
  auto const spec = reference_hardware();
  CHECK(spec.k_max() == Approx(695.65217391304347826).epsilon(1e-14));
  auto const b = normalized_bounds(spec);
  // Frozen from an arbitrary-precision evaluation of the closed forms.
  CHECK(b.speed == Approx(0.0122406).epsilon(1e-13));
  CHECK(b.accel == Approx(0.000550827).epsilon(1e-13));

  SECTION("doubling fov doubles both bounds")
  {
    auto s2 = spec;
    s2.fov *= 2;
    auto const b2 = normalized_bounds(s2);
    CHECK(s2.k_max() == Approx(spec.k_max() / 2));
    CHECK(b2.speed == Approx(2 * b.speed).epsilon(1e-14));
    CHECK(b2.accel == Approx(2 * b.accel).epsilon(1e-14));
  }

  SECTION("non-positive fields rejected")
  {
    auto bad = spec;
    bad.g_max = 0;
    CHECK_THROWS_AS(normalized_bounds(bad), Error);
    bad = spec;
    bad.fov = -1;
    CHECK_THROWS_AS(normalized_bounds(bad), Error);
  }

  SECTION("vanishing g_max drives alpha to zero")
  {
    auto s = spec;
    s.g_max = 1e-300;
    CHECK(normalized_bounds(s).speed < 1e-300);
  }

  SECTION("decimation scaling")
  {
    auto const sb = scaled_bounds(b, 4);
    CHECK(sb.speed == Approx(4 * b.speed));
    CHECK(sb.accel == Approx(16 * b.accel));
  }
}

TEST_CASE("hardware spec validation", "[kinematics]")
{
  auto s = reference_hardware();
  CHECK_NOTHROW(s.validate());
  CHECK(s.dwell_ratio() == 5);
  s.dwell_dt = 3e-6;
  CHECK_THROWS_AS(s.validate(), Error);
  s.dwell_dt = 2e-5;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("gradient profile", "[kinematics]")
{
  auto const spec = reference_hardware();
  double const to_g = 2 * spec.k_max() / (spec.gamma * spec.raster_dt);

  SECTION("constant trajectory")
  {
    Trajectory t(2, 10);
    for (int c = 0; c < 2; ++c) {
      t.shot(c).rowwise() = Eigen::RowVector2d(0.1, -0.2);
    }
    auto const p = traj_to_profile(t, spec);
    for (int c = 0; c < 2; ++c) {
      CHECK(p.gradient_norms[c].size() == 9);
      CHECK(p.slew_norms[c].size() == 8);
      CHECK(p.gradient_norms[c].maxCoeff() == 0.0);
      CHECK(p.slew_norms[c].maxCoeff() == 0.0);
    }
  }

  SECTION("straight line with constant increment")
  {
    double const d = 0.01;
    Trajectory t(1, 6);
    for (int i = 0; i < 6; ++i) {
      t.shot(0)(i, 0) = d * i * 0.6;
      t.shot(0)(i, 1) = d * i * 0.8;
    }
    auto const p = traj_to_profile(t, spec);
    for (double g : p.gradient_norms[0]) {
      CHECK(g == Approx(to_g * d).epsilon(1e-12));
    }
    CHECK(p.slew_norms[0].maxCoeff() < 1e-6);
  }

  SECTION("random trajectory against direct difference quotients")
  {
    std::mt19937_64 rng(7);
    auto const t = random_traj(rng, 2, 8);
    auto const p = traj_to_profile(t, spec);
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 7; ++i) {
        for (int a = 0; a < 2; ++a) {
          double const g = 2 * spec.k_max() * (t.shot(c)(i + 1, a) - t.shot(c)(i, a)) / (spec.gamma * spec.raster_dt);
          CHECK(p.gradients[c](i, a) == Approx(g).epsilon(1e-14));
        }
      }
      for (int i = 0; i < 6; ++i) {
        for (int a = 0; a < 2; ++a) {
          double const g0 = 2 * spec.k_max() * (t.shot(c)(i + 1, a) - t.shot(c)(i, a)) / (spec.gamma * spec.raster_dt);
          double const g1 =
            2 * spec.k_max() * (t.shot(c)(i + 2, a) - t.shot(c)(i + 1, a)) / (spec.gamma * spec.raster_dt);
          CHECK(p.slew[c](i, a) == Approx((g1 - g0) / spec.raster_dt).epsilon(1e-12));
        }
      }
    }
  }

  SECTION("linearity")
  {
    std::mt19937_64 rng(11);
    auto const k1 = random_traj(rng, 3, 9);
    auto const k2 = random_traj(rng, 3, 9);
    double const a = 0.3, b = -1.7;
    auto const p = traj_to_profile(a * k1 + b * k2, spec);
    auto const p1 = traj_to_profile(k1, spec);
    auto const p2 = traj_to_profile(k2, spec);
    for (int c = 0; c < 3; ++c) {
      CHECK((p.gradients[c] - (a * p1.gradients[c] + b * p2.gradients[c])).norm() <= 1e-9 * p.gradients[c].norm());
      CHECK((p.slew[c] - (a * p1.slew[c] + b * p2.slew[c])).norm() <= 1e-9 * p.slew[c].norm());
    }
  }

  SECTION("too few samples or decimated input rejected")
  {
    CHECK_THROWS_AS(traj_to_profile(Trajectory(1, 2), spec), Error);
    CHECK_THROWS_AS(traj_to_profile(Trajectory(1, 5, 2), spec), Error);
  }
}

TEST_CASE("undersampling factor", "[kinematics]")
{
  CHECK(undersampling_factor(320, 16, 512, 5) == 2.5);
  CHECK(undersampling_factor(32, 1, 32 * 32, 1) == 1.0);
  CHECK(undersampling_factor(64, 4, 64, 4) == 4.0);
  CHECK(undersampling_factor(100, 7, 13, 3) == undersampling_factor(100, 13, 7, 3));
  CHECK_THROWS_AS(undersampling_factor(64, 0, 64, 4), Error);
  CHECK_THROWS_AS(undersampling_factor(64, 4, 64, 0), Error);
}

TEST_CASE("trajectory file formats", "[io]")
{
  std::mt19937_64 rng(3);
  auto const t = random_traj(rng, 3, 7);

  SECTION("csv preserves every double")
  {
    std::stringstream ss;
    write_trajectory_csv(ss, t);
    CHECK(ss.str().rfind("shot,index,kx,ky\n", 0) == 0);
    auto const back = read_trajectory_csv(ss);
    CHECK(back == t);
  }

  SECTION("binary layout and round trip")
  {
    std::stringstream ss;
    write_trajectory_bin(ss, t);
    auto const bytes = ss.str();
    REQUIRE(bytes.size() == 12 + 3 * 7 * 2 * 8);
    std::uint32_t hdr[3];
    std::memcpy(hdr, bytes.data(), 12);
    CHECK(hdr[0] == 3);
    CHECK(hdr[1] == 7);
    CHECK(hdr[2] == 2);
    double second;
    std::memcpy(&second, bytes.data() + 12 + 8, 8);
    CHECK(second == t.shot(0)(0, 1));
    CHECK(read_trajectory_bin(ss) == t);
  }

  SECTION("malformed input")
  {
    std::stringstream bad("kx,ky\n0,0\n");
    CHECK_THROWS_AS(read_trajectory_csv(bad), Error);
    std::stringstream gap("shot,index,kx,ky\n0,0,0,0\n0,2,0,0\n");
    CHECK_THROWS_AS(read_trajectory_csv(gap), Error);
    std::stringstream trunc(std::string("\x01\x00\x00\x00\x02\x00\x00\x00\x02\x00\x00\x00", 12));
    CHECK_THROWS_AS(read_trajectory_bin(trunc), Error);
  }
}
