#include "hydrolim/snapshot_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "hydrolim/errors.hpp"

namespace hydrolim {

namespace {

constexpr char kMagic[8] = {'H', 'L', 'S', 'N', 'A', 'P', '0', '1'};
constexpr std::uint8_t kDtypeInt64 = 0;
constexpr std::uint8_t kDtypeFloat64 = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw NumericError("truncated snapshot file");
  return v;
}

template <typename ColumnT>
void write_binary_impl(const std::filesystem::path& file, const std::vector<double>& times,
                       const std::vector<std::vector<ColumnT>>& columns, std::uint8_t dtype) {
  if (times.size() != columns.size())
    throw ConfigError("trajectory times and columns must align");
  const std::uint32_t checkpoints = static_cast<std::uint32_t>(columns.size());
  const std::uint32_t sites = checkpoints == 0 ? 0 : static_cast<std::uint32_t>(columns[0].size());
  for (const auto& col : columns)
    if (col.size() != sites) throw ConfigError("trajectory columns must share a lattice size");

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericError("cannot open snapshot file for writing: " + file.string());
  out.write(kMagic, sizeof(kMagic));
  put(out, dtype);
  put(out, sites);
  put(out, checkpoints);
  for (double t : times) put(out, t);
  for (const auto& col : columns)
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(col.size() * sizeof(ColumnT)));
  if (!out) throw NumericError("snapshot write failed: " + file.string());
}

template <typename ColumnT>
void read_binary_impl(const std::filesystem::path& file, std::uint8_t expected_dtype,
                      std::vector<double>& times, std::vector<std::vector<ColumnT>>& columns) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw NumericError("cannot open snapshot file: " + file.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw NumericError("not a snapshot file: " + file.string());
  const auto dtype = get<std::uint8_t>(in);
  if (dtype != expected_dtype) throw NumericError("snapshot dtype mismatch: " + file.string());
  const auto sites = get<std::uint32_t>(in);
  const auto checkpoints = get<std::uint32_t>(in);
  times.resize(checkpoints);
  for (auto& t : times) t = get<double>(in);
  columns.assign(checkpoints, std::vector<ColumnT>(sites));
  for (auto& col : columns) {
    in.read(reinterpret_cast<char*>(col.data()),
            static_cast<std::streamsize>(col.size() * sizeof(ColumnT)));
    if (!in) throw NumericError("truncated snapshot file: " + file.string());
  }
}

std::string format_value(std::int64_t v) { return std::to_string(v); }

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

template <typename ColumnT>
void write_csv_impl(const std::filesystem::path& file, const std::vector<double>& times,
                    const std::vector<std::vector<ColumnT>>& columns) {
  if (times.size() != columns.size())
    throw ConfigError("trajectory times and columns must align");
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw NumericError("cannot open snapshot file for writing: " + file.string());
  out << "checkpoint,time,site,value\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t x = 0; x < columns[c].size(); ++x)
      out << c << ',' << format_value(times[c]) << ',' << x << ','
          << format_value(columns[c][x]) << '\n';
  if (!out) throw NumericError("snapshot write failed: " + file.string());
}

void parse_value(const std::string& tok, std::int64_t& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw NumericError("bad integer in snapshot csv: " + tok);
}

void parse_value(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    if (used != tok.size()) throw NumericError("bad real in snapshot csv: " + tok);
  } catch (const std::logic_error&) {
    throw NumericError("bad real in snapshot csv: " + tok);
  }
}

template <typename ColumnT>
void read_csv_impl(const std::filesystem::path& file, std::vector<double>& times,
                   std::vector<std::vector<ColumnT>>& columns) {
  std::ifstream in(file);
  if (!in) throw NumericError("cannot open snapshot file: " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != "checkpoint,time,site,value")
    throw NumericError("bad snapshot csv header: " + file.string());
  times.clear();
  columns.clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c_tok, t_tok, x_tok, v_tok;
    if (!std::getline(ss, c_tok, ',') || !std::getline(ss, t_tok, ',') ||
        !std::getline(ss, x_tok, ',') || !std::getline(ss, v_tok))
      throw NumericError("bad snapshot csv row: " + line);
    std::int64_t c = 0, x = 0;
    parse_value(c_tok, c);
    parse_value(x_tok, x);
    double t = 0.0;
    parse_value(t_tok, t);
    ColumnT v{};
    parse_value(v_tok, v);
    if (c < 0 || x < 0) throw NumericError("bad snapshot csv indices: " + line);
    if (static_cast<std::size_t>(c) >= columns.size()) {
      columns.resize(static_cast<std::size_t>(c) + 1);
      times.resize(static_cast<std::size_t>(c) + 1, 0.0);
    }
    times[static_cast<std::size_t>(c)] = t;
    auto& col = columns[static_cast<std::size_t>(c)];
    if (static_cast<std::size_t>(x) >= col.size()) col.resize(static_cast<std::size_t>(x) + 1);
    col[static_cast<std::size_t>(x)] = v;
  }
  for (const auto& col : columns)
    if (col.size() != columns.front().size())
      throw NumericError("ragged snapshot csv: " + file.string());
}

}  // namespace

void write_trajectory_binary(const std::filesystem::path& file, const Int64Trajectory& traj) {
  write_binary_impl(file, traj.times, traj.columns, kDtypeInt64);
}

void write_trajectory_binary(const std::filesystem::path& file, const DoubleTrajectory& traj) {
  write_binary_impl(file, traj.times, traj.columns, kDtypeFloat64);
}

Int64Trajectory read_int64_trajectory_binary(const std::filesystem::path& file) {
  Int64Trajectory traj;
  read_binary_impl(file, kDtypeInt64, traj.times, traj.columns);
  return traj;
}

DoubleTrajectory read_double_trajectory_binary(const std::filesystem::path& file) {
  DoubleTrajectory traj;
  read_binary_impl(file, kDtypeFloat64, traj.times, traj.columns);
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& file, const Int64Trajectory& traj) {
  write_csv_impl(file, traj.times, traj.columns);
}

void write_trajectory_csv(const std::filesystem::path& file, const DoubleTrajectory& traj) {
  write_csv_impl(file, traj.times, traj.columns);
}

Int64Trajectory read_int64_trajectory_csv(const std::filesystem::path& file) {
  Int64Trajectory traj;
  read_csv_impl(file, traj.times, traj.columns);
  return traj;
}

DoubleTrajectory read_double_trajectory_csv(const std::filesystem::path& file) {
  DoubleTrajectory traj;
  read_csv_impl(file, traj.times, traj.columns);
  return traj;
}

}  // namespace hydrolim
