#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hydrolim/lattice.hpp"
#include "hydrolim/models.hpp"
#include "hydrolim/profile.hpp"
#include "hydrolim/rng.hpp"

namespace hydrolim {

enum class ModelKind { zrp, glk };

// Partition function and fugacity <-> density dictionary of a single-site
// equilibrium family.
//
// Zero range:      n_lambda(k) = lambda^k / (g(k)! Z(lambda)),
//                  Z(lambda)   = sum_k lambda^k / g(k)!,
//                  R(lambda)   = lambda Z'(lambda) / Z(lambda).
// Ginzburg-Landau: n_lambda(dr) ~ exp(lambda r - V(r)) dr,
//                  R(lambda)   = Z'(lambda) / Z(lambda).
// sigma = R^{-1} is strictly increasing on the admissible density range.
class EquilibriumStructure {
 public:
  static EquilibriumStructure for_zrp(JumpRate g);
  static EquilibriumStructure for_glk(Potential v);

  ModelKind kind() const { return kind_; }
  // Radius of convergence of the zero-range series (+inf for GLK).
  double lambda_star() const { return lambda_star_; }

  double partition(double lambda) const;
  double mean_density(double lambda) const;
  double density_variance(double lambda) const;

  // Inverts R to tolerance |R(sigma(rho)) - rho| <= 1e-10 * max(1, |rho|)
  // by bracketing bisection plus a few Newton polish steps.
  double sigma(double rho) const;
  double sigma_prime(double rho) const;

  // One draw from n_lambda.  Integer-valued (returned as double) for the
  // zero-range family.
  double sample_site(double lambda, Rng& rng) const;

  // g(k) for ZRP, V'(r) for GLK: the microscopic flux observable whose
  // equilibrium expectation is sigma(density).
  double flux(double site_value) const;

  const JumpRate& jump_rate() const;
  const Potential& potential() const;

 private:
  EquilibriumStructure() = default;

  struct Moments {
    double z;     // partition value
    double mean;  // R(lambda)
    double var;   // single-site variance
  };
  Moments moments(double lambda) const;
  Moments zrp_moments(double lambda) const;
  Moments glk_moments(double lambda) const;
  double glk_mode(double lambda) const;

  ModelKind kind_ = ModelKind::zrp;
  std::optional<JumpRate> g_;
  std::optional<Potential> v_;
  double lambda_star_ = 0.0;
};

// Slowly varying product measure: site x carries fugacity sigma(f(x/N)).
// Fugacities are resolved once at construction; sampling then only runs the
// single-site samplers.
class LocalGibbsSpec {
 public:
  LocalGibbsSpec(std::shared_ptr<const EquilibriumStructure> eq, TorusLattice lattice,
                 const std::function<double(double)>& profile);
  // Profile read from a PDE grid with periodic linear interpolation.
  LocalGibbsSpec(std::shared_ptr<const EquilibriumStructure> eq, TorusLattice lattice,
                 const MacroProfile& profile);

  int sites() const { return lattice_.sites; }
  double fugacity(int x) const { return fugacity_[static_cast<std::size_t>(x)]; }
  double target_mean(int x) const { return target_mean_[static_cast<std::size_t>(x)]; }
  const EquilibriumStructure& equilibrium() const { return *eq_; }

  ZrpConfiguration sample_zrp(Rng& rng) const;
  GlkConfiguration sample_glk(Rng& rng) const;

 private:
  std::shared_ptr<const EquilibriumStructure> eq_;
  TorusLattice lattice_;
  std::vector<double> fugacity_;
  std::vector<double> target_mean_;
};

// Optional mixing diagnostic for the canonical MCMC samplers: flux means
// over the two halves of the burn-in chain plus a crude standard error.
struct SplitChainDiag {
  double first_half_mean = 0.0;
  double second_half_mean = 0.0;
  double stderr_estimate = 0.0;
};

// Draws from the canonical (mass-conditioned) measure on a cube of 2l+1
// sites with mean density m.  For g(k) = k the conditioned measure is exact
// multinomial placement; otherwise a mass-conserving single-particle-move
// Metropolis chain is run for max(mcmc_steps, 50 (2l+1)^2) steps.
std::vector<std::int64_t> sample_canonical_zrp(const EquilibriumStructure& eq, int ell,
                                               double mean_value, Rng& rng,
                                               std::int64_t mcmc_steps = 0,
                                               SplitChainDiag* diag = nullptr);

// Pairwise Gaussian-exchange Metropolis under the same step floor.  Total
// spin is conserved to floating-point roundoff.
std::vector<double> sample_canonical_glk(const EquilibriumStructure& eq, int ell,
                                         double mean_value, Rng& rng,
                                         std::int64_t mcmc_steps = 0,
                                         SplitChainDiag* diag = nullptr);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double stderr_value = 0.0;
  int samples = 0;
};

// Equivalence-of-ensembles error at block scale l: Monte Carlo estimate of
// E_canonical[<flux>_cube] - sigma(m) with a bootstrap standard error.
MonteCarloEstimate ensembles_error(const EquilibriumStructure& eq, int ell, double mean_value,
                                   int samples, Rng& rng);

// Piecewise-linear cache of sigma on [lo, hi]; the PDE solver needs sigma
// at every grid node every step and the implicit inversion is far too slow
// for that.
class SigmaInterpolant {
 public:
  SigmaInterpolant(const EquilibriumStructure& eq, double lo, double hi, int points = 2049);
  double operator()(double rho) const;
  double sup_derivative() const;

 private:
  double lo_, hi_, step_;
  std::vector<double> values_;
};

}  // namespace hydrolim
