#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hydrolim {

// Trajectory storage: one column of site values per checkpoint.  The binary
// layout is a fixed header (magic, dtype, sites, checkpoints) followed by
// the checkpoint times and the columns, all little-endian.
struct Int64Trajectory {
  std::vector<double> times;
  std::vector<std::vector<std::int64_t>> columns;
};

struct DoubleTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> columns;
};

void write_trajectory_binary(const std::filesystem::path& file, const Int64Trajectory& traj);
void write_trajectory_binary(const std::filesystem::path& file, const DoubleTrajectory& traj);

Int64Trajectory read_int64_trajectory_binary(const std::filesystem::path& file);
DoubleTrajectory read_double_trajectory_binary(const std::filesystem::path& file);

// Long-format CSV with columns (checkpoint, time, site, value); one row per
// site per checkpoint.
void write_trajectory_csv(const std::filesystem::path& file, const Int64Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& file, const DoubleTrajectory& traj);

Int64Trajectory read_int64_trajectory_csv(const std::filesystem::path& file);
DoubleTrajectory read_double_trajectory_csv(const std::filesystem::path& file);

}  // namespace hydrolim
