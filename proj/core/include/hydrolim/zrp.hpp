#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hydrolim/lattice.hpp"
#include "hydrolim/models.hpp"
#include "hydrolim/rng.hpp"
#include "hydrolim/weighted_tree.hpp"

namespace hydrolim {

struct ZrpSnapshot {
  double time = 0.0;  // macroscopic
  std::vector<std::int64_t> occupation;
};

// Gillespie event loop for the zero-range process under parabolic scaling:
// site x fires at rate N^2 g(eta_x), the displacement is drawn from the
// kernel, and time is kept in macroscopic units.
class ZrpSimulator {
 public:
  ZrpSimulator(ZrpConfiguration initial, TransitionKernel kernel, JumpRate g);

  // One event.  Returns the macroscopic waiting time, or nullopt when the
  // configuration is absorbing (total rate zero).
  std::optional<double> step(Rng& rng);

  // Runs events until the trajectory passes t_macro.  The state is frozen
  // between events, so on return config() is the state at t_macro exactly.
  void advance_to(double t_macro, Rng& rng);

  const ZrpConfiguration& config() const { return config_; }
  double time() const { return time_; }
  // Lambda = N^2 sum_x g(eta_x).
  double total_rate() const { return n2_ * rates_.total(); }
  std::int64_t events() const { return events_; }

 private:
  void refresh_rate(int x);
  void maybe_rebuild();

  ZrpConfiguration config_;
  TransitionKernel kernel_;
  JumpRate g_;
  TorusLattice lattice_;
  WeightedIndexTree rates_;
  double n2_;
  double time_ = 0.0;
  std::int64_t events_ = 0;
  std::int64_t sets_since_check_ = 0;
};

// Snapshots at the requested macroscopic checkpoint times (must be
// non-decreasing; t_end must bound them).
std::vector<ZrpSnapshot> simulate_zrp(const ZrpConfiguration& initial,
                                      const TransitionKernel& kernel, const JumpRate& g,
                                      double t_end, std::span<const double> checkpoints,
                                      Rng& rng);

// ---------------------------------------------------------------------------
// Coupled pair
// ---------------------------------------------------------------------------

struct CoupledZrpSnapshot {
  double time = 0.0;
  std::vector<std::int64_t> eta;
  std::vector<std::int64_t> zeta;
};

// Coupling that splits each site's activity into a common part of rate
// min(g(eta_x), g(zeta_x)), which moves both copies along the same
// displacement, and two residual parts that move a single copy.  The
// marginals are the original dynamics and the normalized l1 distance is
// non-increasing in expectation.
class CoupledZrpSimulator {
 public:
  CoupledZrpSimulator(ZrpConfiguration eta, ZrpConfiguration zeta, TransitionKernel kernel,
                      JumpRate g);

  std::optional<double> step(Rng& rng);
  void advance_to(double t_macro, Rng& rng);

  const ZrpConfiguration& eta() const { return eta_; }
  const ZrpConfiguration& zeta() const { return zeta_; }
  double time() const { return time_; }

  // Normalized l1 distance (1/N) sum_x |eta_x - zeta_x|.
  double l1_distance() const;

 private:
  void refresh_weight(int x);

  ZrpConfiguration eta_;
  ZrpConfiguration zeta_;
  TransitionKernel kernel_;
  JumpRate g_;
  TorusLattice lattice_;
  WeightedIndexTree weights_;  // per-site max(g(eta), g(zeta))
  double n2_;
  double time_ = 0.0;
  std::int64_t sets_since_check_ = 0;
};

std::vector<CoupledZrpSnapshot> simulate_zrp_coupled(const ZrpConfiguration& eta0,
                                                     const ZrpConfiguration& zeta0,
                                                     const TransitionKernel& kernel,
                                                     const JumpRate& g, double t_end,
                                                     std::span<const double> checkpoints,
                                                     Rng& rng);

}  // namespace hydrolim
