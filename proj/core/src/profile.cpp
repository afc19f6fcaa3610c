#include "hydrolim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrolim {

MacroProfile::MacroProfile(int grid, std::vector<double> vals, double t)
    : grid_size(grid), values(std::move(vals)), time(t) {
  if (grid < 2 || values.size() != static_cast<std::size_t>(grid))
    throw std::invalid_argument("MacroProfile grid/value size mismatch");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite profile value");
  }
}

MacroProfile MacroProfile::from_function(int grid, const std::function<double(double)>& f,
                                         double t) {
  std::vector<double> vals(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) vals[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / grid);
  return MacroProfile(grid, std::move(vals), t);
}

double MacroProfile::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / grid_size;
}

double MacroProfile::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double MacroProfile::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double MacroProfile::value_at(double u) const {
  double frac = u - std::floor(u);
  const double pos = frac * grid_size;
  const int i = static_cast<int>(pos) % grid_size;
  const double w = pos - static_cast<double>(static_cast<int>(pos));
  const int j = (i + 1) % grid_size;
  return (1.0 - w) * values[static_cast<std::size_t>(i)] + w * values[static_cast<std::size_t>(j)];
}

double MacroProfile::max_distance_to_flat() const {
  const double rho = mass();
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - rho));
  return worst;
}

}  // namespace hydrolim
