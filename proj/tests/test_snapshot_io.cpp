#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "hydrolim/errors.hpp"
#include "hydrolim/snapshot_io.hpp"

using namespace hydrolim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "hydrolim_io_tests";
  fs::create_directories(dir);
  return dir;
}

Int64Trajectory sample_int_trajectory() {
  Int64Trajectory traj;
  traj.times = {0.0, 0.05, 0.1};
  traj.columns = {{0, 1, 2, 3},
                  {-7, 123456789012345, 0, 42},
                  {9, 9, 9, 9}};
  return traj;
}

DoubleTrajectory sample_double_trajectory() {
  DoubleTrajectory traj;
  traj.times = {0.0, 0.25};
  traj.columns = {{0.1, -2.5e-17, 1e300, 0.0},
                  {1.0 / 3.0, 2.0, -4.75, 1e-300}};
  return traj;
}

}  // namespace

TEST_CASE("int64 binary round trip is exact") {
  const fs::path file = scratch_dir() / "traj_int.bin";
  const auto traj = sample_int_trajectory();
  write_trajectory_binary(file, traj);
  const auto back = read_int64_trajectory_binary(file);
  CHECK(back.times == traj.times);
  CHECK(back.columns == traj.columns);
}

TEST_CASE("double binary round trip is exact") {
  const fs::path file = scratch_dir() / "traj_double.bin";
  const auto traj = sample_double_trajectory();
  write_trajectory_binary(file, traj);
  const auto back = read_double_trajectory_binary(file);
  CHECK(back.times == traj.times);
  CHECK(back.columns == traj.columns);
}

TEST_CASE("empty trajectory round trips") {
  const fs::path file = scratch_dir() / "traj_empty.bin";
  write_trajectory_binary(file, Int64Trajectory{});
  const auto back = read_int64_trajectory_binary(file);
  CHECK(back.times.empty());
  CHECK(back.columns.empty());
}

TEST_CASE("dtype mismatch is rejected") {
  const fs::path file = scratch_dir() / "traj_dtype.bin";
  write_trajectory_binary(file, sample_double_trajectory());
  CHECK_THROWS_AS(read_int64_trajectory_binary(file), NumericError);
}

TEST_CASE("corrupted files are rejected") {
  const fs::path truncated = scratch_dir() / "traj_truncated.bin";
  write_trajectory_binary(truncated, sample_int_trajectory());
  fs::resize_file(truncated, 20);
  CHECK_THROWS_AS(read_int64_trajectory_binary(truncated), NumericError);

  const fs::path not_snapshot = scratch_dir() / "not_snapshot.bin";
  std::ofstream(not_snapshot) << "hello, this is not a trajectory";
  CHECK_THROWS_AS(read_int64_trajectory_binary(not_snapshot), NumericError);

  CHECK_THROWS_AS(read_int64_trajectory_binary(scratch_dir() / "missing.bin"), NumericError);
}

TEST_CASE("misaligned trajectories are rejected at write time") {
  Int64Trajectory bad_times;
  bad_times.times = {0.0, 0.1};
  bad_times.columns = {{1, 2}};
  CHECK_THROWS_AS(write_trajectory_binary(scratch_dir() / "x.bin", bad_times), ConfigError);
  CHECK_THROWS_AS(write_trajectory_csv(scratch_dir() / "x.csv", bad_times), ConfigError);

  Int64Trajectory ragged;
  ragged.times = {0.0, 0.1};
  ragged.columns = {{1, 2}, {3}};
  CHECK_THROWS_AS(write_trajectory_binary(scratch_dir() / "y.bin", ragged), ConfigError);
}

TEST_CASE("int64 csv round trip is exact") {
  const fs::path file = scratch_dir() / "traj_int.csv";
  const auto traj = sample_int_trajectory();
  write_trajectory_csv(file, traj);
  const auto back = read_int64_trajectory_csv(file);
  CHECK(back.times == traj.times);
  CHECK(back.columns == traj.columns);
}

TEST_CASE("double csv round trip is exact") {
  // max_digits10 formatting makes the text form round-trip bit for bit.
  const fs::path file = scratch_dir() / "traj_double.csv";
  const auto traj = sample_double_trajectory();
  write_trajectory_csv(file, traj);
  const auto back = read_double_trajectory_csv(file);
  CHECK(back.times == traj.times);
  CHECK(back.columns == traj.columns);
}

TEST_CASE("malformed csv inputs are rejected") {
  const fs::path bad_header = scratch_dir() / "bad_header.csv";
  std::ofstream(bad_header) << "time,site,value\n0,0.0,0,1\n";
  CHECK_THROWS_AS(read_int64_trajectory_csv(bad_header), NumericError);

  const fs::path bad_row = scratch_dir() / "bad_row.csv";
  std::ofstream(bad_row) << "checkpoint,time,site,value\n0,0.0,2\n";
  CHECK_THROWS_AS(read_int64_trajectory_csv(bad_row), NumericError);

  const fs::path bad_token = scratch_dir() / "bad_token.csv";
  std::ofstream(bad_token) << "checkpoint,time,site,value\n0,0.0,0,seven\n";
  CHECK_THROWS_AS(read_int64_trajectory_csv(bad_token), NumericError);

  const fs::path ragged = scratch_dir() / "ragged.csv";
  std::ofstream(ragged) << "checkpoint,time,site,value\n0,0.0,0,1\n0,0.0,1,2\n1,0.5,0,3\n";
  CHECK_THROWS_AS(read_int64_trajectory_csv(ragged), NumericError);

  const fs::path negative_index = scratch_dir() / "neg.csv";
  std::ofstream(negative_index) << "checkpoint,time,site,value\n-1,0.0,0,1\n";
  CHECK_THROWS_AS(read_int64_trajectory_csv(negative_index), NumericError);
}
