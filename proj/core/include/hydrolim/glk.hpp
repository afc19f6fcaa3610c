#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hydrolim/lattice.hpp"
#include "hydrolim/models.hpp"
#include "hydrolim/rng.hpp"

namespace hydrolim {

struct GlkSnapshot {
  double time_requested = 0.0;  // macroscopic checkpoint time
  double time_actual = 0.0;     // nearest reachable step multiple
  std::vector<double> spins;
};

struct GlkRunInfo {
  int dt_halvings = 0;          // stability monitor trips
  double final_dt_micro = 0.0;
  double max_alignment_error = 0.0;  // |time_actual - time_requested|
};

struct GlkIntegratorOptions {
  double dt_micro = 0.1;          // microscopic step; 0.1/N^2 macroscopic
  int stability_check_interval = 256;
};

// Euler-Maruyama integrator for the Ginzburg-Landau Kawasaki dynamics.  Per
// microscopic unit time the drift at site x is half the discrete Laplacian
// of V'(eta) and every nearest-neighbour edge carries an independent unit
// Brownian motion applied antisymmetrically, which conserves the total spin
// and leaves prod exp(-V) invariant on each mass shell.
class GlkSimulator {
 public:
  GlkSimulator(GlkConfiguration initial, Potential v, GlkIntegratorOptions opts = {});

  void em_step(Rng& rng);
  // Advances to the integer step count closest to t_macro; returns the
  // actual macroscopic time reached.
  double advance_to(double t_macro, Rng& rng);

  const GlkConfiguration& config() const { return config_; }
  double time_macro() const { return micro_time_ / n2_; }
  double dt_micro() const { return dt_; }
  int halvings() const { return halvings_; }

 private:
  void stability_check();

  GlkConfiguration config_;
  Potential v_;
  GlkIntegratorOptions opts_;
  double dt_;
  double sqrt_dt_;
  double n2_;
  double micro_time_ = 0.0;
  int steps_since_check_ = 0;
  int halvings_ = 0;
  std::vector<double> vprime_;
  std::vector<double> noise_;
};

std::vector<GlkSnapshot> simulate_glk(const GlkConfiguration& initial, const Potential& v,
                                      double t_end, std::span<const double> checkpoints,
                                      double dt_micro, Rng& rng, GlkRunInfo* info = nullptr);

// ---------------------------------------------------------------------------
// Coupled pair (synchronous coupling: both copies see the same per-edge
// Gaussian increments, so the difference field evolves by the drift alone).
// ---------------------------------------------------------------------------

struct CoupledGlkSnapshot {
  double time_requested = 0.0;
  double time_actual = 0.0;
  std::vector<double> eta;
  std::vector<double> zeta;
};

std::vector<CoupledGlkSnapshot> simulate_glk_coupled(const GlkConfiguration& eta0,
                                                     const GlkConfiguration& zeta0,
                                                     const Potential& v, double t_end,
                                                     std::span<const double> checkpoints,
                                                     double dt_micro, Rng& rng,
                                                     GlkRunInfo* info = nullptr);

}  // namespace hydrolim
