#include "hydrolim/pde.hpp"

#include <algorithm>
#include <cmath>

#include "hydrolim/errors.hpp"

namespace hydrolim {

double cfl_limit(int grid_size, double diffusivity, double sup_sigma_prime) {
  if (grid_size < 2) throw ConfigError("pde grid needs at least two cells");
  if (!(diffusivity > 0.0)) throw ConfigError("diffusivity must be > 0");
  if (!(sup_sigma_prime > 0.0)) throw ConfigError("sigma derivative bound must be > 0");
  const double h = 1.0 / grid_size;
  // Frozen-coefficient von Neumann boundary of the explicit scheme.
  return h * h / (2.0 * diffusivity * sup_sigma_prime);
}

namespace {

void ftcs_update(MacroProfile& f, const ScalarFn& sigma, double diffusivity, double dt,
                 std::vector<double>& scratch) {
  const int m = f.grid_size;
  scratch.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) scratch[static_cast<std::size_t>(i)] = sigma(f.values[static_cast<std::size_t>(i)]);
  const double coef = diffusivity * dt * static_cast<double>(m) * static_cast<double>(m);
  double prev = scratch[static_cast<std::size_t>(m - 1)];
  const double first = scratch[0];
  for (int i = 0; i < m; ++i) {
    const double cur = scratch[static_cast<std::size_t>(i)];
    const double next = (i + 1 == m) ? first : scratch[static_cast<std::size_t>(i + 1)];
    f.values[static_cast<std::size_t>(i)] += coef * (next - 2.0 * cur + prev);
    prev = cur;
  }
  f.time += dt;
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericError("pde state became non-finite");
}

double sup_abs_difference(std::span<const double> v, int order, double scale) {
  // order-th forward difference, periodic, scaled by grid^order.
  const int m = static_cast<int>(v.size());
  std::vector<double> cur(v.begin(), v.end());
  for (int o = 0; o < order; ++o) {
    std::vector<double> next(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      next[static_cast<std::size_t>(i)] =
          cur[static_cast<std::size_t>((i + 1) % m)] - cur[static_cast<std::size_t>(i)];
    cur.swap(next);
  }
  double sup = 0.0;
  for (double x : cur) sup = std::max(sup, std::abs(x));
  return sup * std::pow(scale, order);
}

}  // namespace

void pde_step(MacroProfile& f, const ScalarFn& sigma, double diffusivity,
              double sup_sigma_prime, double dt) {
  const double limit = cfl_limit(f.grid_size, diffusivity, sup_sigma_prime);
  if (dt > limit * (1.0 + 1e-12))
    throw CflViolation("explicit step exceeds the parabolic stability bound", limit);
  std::vector<double> scratch;
  ftcs_update(f, sigma, diffusivity, dt, scratch);
}

void pde_step_unchecked(MacroProfile& f, const ScalarFn& sigma, double diffusivity, double dt) {
  std::vector<double> scratch;
  ftcs_update(f, sigma, diffusivity, dt, scratch);
}

std::vector<MacroProfile> pde_solve(const MacroProfile& initial, const ScalarFn& sigma,
                                    double diffusivity, double sup_sigma_prime, double t_end,
                                    std::span<const double> checkpoints, PdeDiagnostics* diag,
                                    double cfl_fraction) {
  if (!(cfl_fraction > 0.0) || cfl_fraction >= 1.0)
    throw ConfigError("cfl fraction must lie in (0, 1)");
  double prev = 0.0;
  for (double t : checkpoints) {
    if (t < prev) throw ConfigError("checkpoint times must be non-decreasing");
    if (t > t_end + 1e-12) throw ConfigError("checkpoint beyond t_end");
    prev = t;
  }

  MacroProfile f = initial;
  const double mass0 = f.mass();
  const double dt_full = cfl_fraction * cfl_limit(f.grid_size, diffusivity, sup_sigma_prime);
  const double grid = static_cast<double>(f.grid_size);

  double run_min = f.min_value();
  double run_max = f.max_value();
  std::vector<double> scratch;

  const auto advance_to = [&](double target) {
    while (f.time < target - 1e-15) {
      const double dt = std::min(dt_full, target - f.time);
      ftcs_update(f, sigma, diffusivity, dt, scratch);
      run_min = std::min(run_min, f.min_value());
      run_max = std::max(run_max, f.max_value());
    }
    f.time = target;  // absorb accumulated roundoff in the time stamp
  };

  std::vector<MacroProfile> out;
  out.reserve(checkpoints.size());
  for (double tc : checkpoints) {
    advance_to(tc);
    out.push_back(f);
    if (diag) {
      diag->checkpoint_times.push_back(tc);
      diag->sup_gradient.push_back(sup_abs_difference(f.values, 1, grid));
      diag->sup_curvature.push_back(sup_abs_difference(f.values, 2, grid));
      diag->sup_third.push_back(sup_abs_difference(f.values, 3, grid));
    }
  }
  advance_to(t_end);

  if (diag) {
    diag->mass_drift = std::abs(f.mass() - mass0);
    diag->min_value = run_min;
    diag->max_value = run_max;
  }
  return out;
}

bool comparison_check(const PdeDiagnostics& diag, double lo, double hi, double tol) {
  return diag.min_value >= lo - tol && diag.max_value <= hi + tol;
}

}  // namespace hydrolim
