#pragma once

#include "ktraj/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace ktraj {

// CSV: header `shot,index,kx,ky`, one row per point, 17 significant digits.
void write_trajectory_csv(std::ostream &os, Trajectory const &traj);
Trajectory read_trajectory_csv(std::istream &is);

// Binary: little-endian u32 Nc, u32 Ns, u32 dims (=2), then float64 shot-major.
void write_trajectory_bin(std::ostream &os, Trajectory const &traj);
Trajectory read_trajectory_bin(std::istream &is);

/// Dispatches on extension: `.csv` or anything else as binary.
void save_trajectory(std::filesystem::path const &path, Trajectory const &traj);
Trajectory load_trajectory(std::filesystem::path const &path);

} // namespace ktraj
