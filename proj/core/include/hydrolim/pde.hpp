#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hydrolim/profile.hpp"

namespace hydrolim {

using ScalarFn = std::function<double(double)>;

// Largest forward-Euler step admissible for  d/dt f = c Lap sigma(f)  on a
// grid of the given size when sigma' <= sup_sigma_prime.
double cfl_limit(int grid_size, double diffusivity, double sup_sigma_prime);

// One forward-time centred-space step on the unit torus.  Throws
// CflViolation (carrying the admissible step) when dt exceeds the bound.
void pde_step(MacroProfile& f, const ScalarFn& sigma, double diffusivity,
              double sup_sigma_prime, double dt);

// Same update without the admissibility guard.
void pde_step_unchecked(MacroProfile& f, const ScalarFn& sigma, double diffusivity, double dt);

// Regularity record per checkpoint: sup norms of scaled first, second and
// third central differences, a cheap stand-in for C^3 bounds of the limit.
struct PdeDiagnostics {
  double mass_drift = 0.0;  // |final mass - initial mass|
  double min_value = 0.0;   // extrema over every step of the run
  double max_value = 0.0;
  std::vector<double> checkpoint_times;
  std::vector<double> sup_gradient;
  std::vector<double> sup_curvature;
  std::vector<double> sup_third;
};

// Integrates to t_end, landing on every checkpoint exactly (the step is
// shortened at crossings).  Interior steps use cfl_fraction of the limit,
// so the default is dt = 0.4 h^2 / (c sup sigma').
std::vector<MacroProfile> pde_solve(const MacroProfile& initial, const ScalarFn& sigma,
                                    double diffusivity, double sup_sigma_prime, double t_end,
                                    std::span<const double> checkpoints,
                                    PdeDiagnostics* diag = nullptr, double cfl_fraction = 0.8);

// Monotone sigma gives a comparison principle: the solution stays inside
// the initial range.  An excursion flags an unstable discretisation.
bool comparison_check(const PdeDiagnostics& diag, double lo, double hi, double tol);

}  // namespace hydrolim
