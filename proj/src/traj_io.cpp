#include "ktraj/traj_io.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace ktraj {

static_assert(std::endian::native == std::endian::little, "binary trajectory I/O assumes a little-endian host");

void write_trajectory_csv(std::ostream &os, Trajectory const &traj)
{
  os << "shot,index,kx,ky\n";
  for (int c = 0; c < traj.n_shots(); ++c) {
    auto const &s = traj.shot(c);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      os << fmt::format("{},{},{:.17g},{:.17g}\n", c, i, s(i, 0), s(i, 1));
    }
  }
}

Trajectory read_trajectory_csv(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line) || line.rfind("shot,index,kx,ky", 0) != 0) {
    throw Error("trajectory CSV: missing header `shot,index,kx,ky`");
  }
  std::map<long, std::map<long, std::pair<double, double>>> rows;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") {
      continue;
    }
    std::istringstream ss(line);
    long shot = 0, index = 0;
    double kx = 0, ky = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> shot >> c1 >> index >> c2 >> kx >> c3 >> ky) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw Error(fmt::format("trajectory CSV: malformed line {}", lineno));
    }
    rows[shot][index] = {kx, ky};
  }
  if (rows.empty()) {
    throw Error("trajectory CSV: no samples");
  }
  std::vector<Shot> shots;
  long expect_shot = 0;
  for (auto const &[shot, pts] : rows) {
    if (shot != expect_shot++) {
      throw Error("trajectory CSV: shot indices must be contiguous from 0");
    }
    Shot s(static_cast<Eigen::Index>(pts.size()), 2);
    long expect = 0;
    for (auto const &[idx, xy] : pts) {
      if (idx != expect) {
        throw Error("trajectory CSV: sample indices must be contiguous from 0");
      }
      s(expect, 0) = xy.first;
      s(expect, 1) = xy.second;
      ++expect;
    }
    shots.push_back(std::move(s));
  }
  return Trajectory(std::move(shots));
}

namespace {

void put_u32(std::ostream &os, std::uint32_t v)
{
  os.write(reinterpret_cast<char const *>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream &is)
{
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof v)) {
    throw Error("trajectory binary: truncated header");
  }
  return v;
}

} // namespace

void write_trajectory_bin(std::ostream &os, Trajectory const &traj)
{
  put_u32(os, static_cast<std::uint32_t>(traj.n_shots()));
  put_u32(os, static_cast<std::uint32_t>(traj.n_samples()));
  put_u32(os, 2);
  Eigen::VectorXd const v = traj.flatten();
  os.write(reinterpret_cast<char const *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Trajectory read_trajectory_bin(std::istream &is)
{
  auto const nc = get_u32(is);
  auto const ns = get_u32(is);
  auto const dims = get_u32(is);
  if (dims != 2) {
    throw Error(fmt::format("trajectory binary: only 2D trajectories supported, got dims={}", dims));
  }
  if (nc == 0 || ns == 0 || std::uint64_t(nc) * ns > (std::uint64_t(1) << 32)) {
    throw Error("trajectory binary: implausible dimensions");
  }
  Eigen::VectorXd v(2 * Eigen::Index(nc) * ns);
  if (!is.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)))) {
    throw Error("trajectory binary: truncated payload");
  }
  return Trajectory::unflatten(v, static_cast<int>(nc), static_cast<int>(ns));
}

void save_trajectory(std::filesystem::path const &path, Trajectory const &traj)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  if (path.extension() == ".csv") {
    write_trajectory_csv(os, traj);
  } else {
    write_trajectory_bin(os, traj);
  }
  if (!os) {
    throw Error(fmt::format("error writing {}", path.string()));
  }
}

Trajectory load_trajectory(std::filesystem::path const &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  return path.extension() == ".csv" ? read_trajectory_csv(is) : read_trajectory_bin(is);
}

} // namespace ktraj
