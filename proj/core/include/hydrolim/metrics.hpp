#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hydrolim/profile.hpp"
#include "hydrolim/rng.hpp"

namespace hydrolim {

// ---------------------------------------------------------------------------
// Test-function dictionary
// ---------------------------------------------------------------------------

// Fourier modes on the unit torus: the constant plus cos(2 pi k u) and
// sin(2 pi k u) for k = 1..K, giving 2K+1 observables.
class ObservableDictionary {
 public:
  explicit ObservableDictionary(int max_mode);

  int size() const { return 2 * max_mode_ + 1; }
  int max_mode() const { return max_mode_; }
  std::string label(int index) const;
  // Throws ConfigError on an unknown label ("const", "cos3", "sin1", ...).
  int index_of(const std::string& label) const;
  double evaluate(int index, double u) const;

  // Pairing (1/N) sum_x phi(x/N) field_x of a site field with one observable.
  double pair_field(int index, std::span<const double> field) const;
  double pair_field(int index, std::span<const std::int64_t> field) const;
  // Riemann pairing of the continuum profile, exact for trig polynomials in
  // the grid limit.
  double pair_profile(int index, const MacroProfile& f) const;

 private:
  int max_mode_;
};

// ---------------------------------------------------------------------------
// Wasserstein-1 on the circle
// ---------------------------------------------------------------------------

struct PointMass {
  double position = 0.0;  // in [0, 1)
  double weight = 0.0;    // nonnegative
};

// W1 between two normalized nonnegative measures on the torus, computed as
// min_c int |F_mu - F_nu - c| via the weighted median of the CDF difference.
double w1_circle(std::span<const PointMass> a, std::span<const PointMass> b);

// Empirical measure of a site field (weights eta_x at positions x/N) against
// a grid profile, both normalized to unit mass.
double w1_field_vs_profile(std::span<const std::int64_t> field, const MacroProfile& f);
double w1_field_vs_profile(std::span<const double> field, const MacroProfile& f);

// ---------------------------------------------------------------------------
// Block averages and the consistency statistic
// ---------------------------------------------------------------------------

// Mean of field over the window of half-width ell centred at the site,
// periodic.
double block_average_at(std::span<const double> field, int center, int ell);

// Centres of non-overlapping windows of width 2 ell + 1 starting at site 0;
// the leftover sites at the end of the torus are dropped.
std::vector<int> block_centers(int sites, int ell);

// hat A = <flux>_block - sigma - sigma' (<eta>_block - rho) at one centre.
double block_consistency_stat(std::span<const double> flux_field,
                              std::span<const double> density_field, int center, int ell,
                              double rho, double sigma_rho, double sigma_prime_rho);

// Deterministic factor c Lap[sigma(f)] / sigma(f) per grid node, with the
// discrete Laplacian at the profile resolution.
std::vector<double> consistency_prefactor(const MacroProfile& f,
                                          const std::function<double(double)>& sigma,
                                          double diffusivity);

// ---------------------------------------------------------------------------
// Resampling helpers
// ---------------------------------------------------------------------------

struct MeanWithError {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Sample mean with a bootstrap standard error.
MeanWithError bootstrap_stderr_mean(std::span<const double> xs, Rng& rng, int resamples = 1000);

// Standard deviation of statistic(resampled indices) over bootstrap draws
// from {0..n-1}; lets callers rerun an arbitrary reduction pipeline.
double bootstrap_stderr_indices(int n, int resamples, Rng& rng,
                                const std::function<double(std::span<const int>)>& statistic);

// Time average with trapezoid weights over possibly uneven checkpoints.
double trapezoid_average(std::span<const double> times, std::span<const double> values);

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
  double rate = 0.0;       // slope of log(value) against log(scale)
  double intercept = 0.0;
  double ci_lo = 0.0;      // 95% parametric bootstrap interval for the slope
  double ci_hi = 0.0;
  int points_used = 0;
};

// Weighted least squares in log-log coordinates.  Relative errors below
// 1e-6 are floored so an exact value cannot dominate the fit; points with
// nonpositive values are dropped.
RateFit fit_rate(std::span<const double> scales, std::span<const double> values,
                 std::span<const double> stderrs, Rng& rng, int resamples = 10000);

// ---------------------------------------------------------------------------
// Proportion intervals
// ---------------------------------------------------------------------------

struct WilsonInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

}  // namespace hydrolim
