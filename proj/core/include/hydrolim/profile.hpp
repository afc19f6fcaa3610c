#pragma once

#include <functional>
#include <vector>

namespace hydrolim {

// Periodic grid function on [0, 1): M cells with values at u_i = i/M.
struct MacroProfile {
  MacroProfile() = default;
  MacroProfile(int grid, std::vector<double> vals, double t = 0.0);
  static MacroProfile from_function(int grid, const std::function<double(double)>& f,
                                    double t = 0.0);

  int grid_size = 0;
  std::vector<double> values;
  double time = 0.0;

  // Mean of the cell values; the conserved quantity of the flow.
  double mass() const;
  double min_value() const;
  double max_value() const;

  // Periodic linear interpolation between grid nodes.
  double value_at(double u) const;

  // Sup-norm distance to the constant-mass profile.
  double max_distance_to_flat() const;
};

}  // namespace hydrolim
