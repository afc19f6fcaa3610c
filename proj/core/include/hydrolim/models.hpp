#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hydrolim/rng.hpp"

namespace hydrolim {

// ---------------------------------------------------------------------------
// Transition kernel p for the zero-range process
// ---------------------------------------------------------------------------

struct KernelEntry {
  int displacement;    // nonzero jump offset
  double probability;  // > 0
};

// Finite-range jump law.  Probabilities are normalized at construction when
// they sum to 1 within 1e-12; a larger deviation is rejected.  The first and
// second moments (drift gamma and diffusion coefficient a) are cached.
class TransitionKernel {
 public:
  explicit TransitionKernel(std::vector<KernelEntry> entries);
  static TransitionKernel nearest_neighbour_symmetric();

  const std::vector<KernelEntry>& entries() const { return entries_; }
  double mean() const { return mean_; }            // gamma = sum x p(x)
  double second_moment() const { return second_; } // a = sum x^2 p(x)
  int max_range() const { return max_range_; }

  int sample_displacement(Rng& rng) const;

  // Recomputes the cached moments from the entries; used by property tests.
  bool moments_consistent() const;

 private:
  std::vector<KernelEntry> entries_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double second_ = 0.0;
  int max_range_ = 0;
};

// ---------------------------------------------------------------------------
// Zero-range jump rate g
// ---------------------------------------------------------------------------

// Declared regularity constants.  The validator checks the function against
// them; they are declarations, not guarantees.
struct JumpRateMetadata {
  double lipschitz = 1.0;    // sup_n |g(n+1) - g(n)|
  std::int64_t gap_n0 = 1;   // gap condition offset
  double gap_beta = 1.0;     // gap condition increment
  bool monotone = true;
};

// g : N -> [0, inf) with g tabulated up to a cap and extended linearly
// beyond it using the last tabulated increment.  The linear extension keeps
// the evaluator total for arbitrarily large occupations, which simulation on
// small lattices can reach.
class JumpRate {
 public:
  JumpRate(const std::function<double(std::int64_t)>& form, std::int64_t table_cap,
           JumpRateMetadata meta);

  double operator()(std::int64_t k) const {
    if (k <= 0) return table_[0];
    if (k <= cap_) return table_[static_cast<std::size_t>(k)];
    return table_.back() + slope_ * static_cast<double>(k - cap_);
  }

  const JumpRateMetadata& metadata() const { return meta_; }
  std::int64_t table_cap() const { return cap_; }

  // lim_k g(k): +inf when the extension slope is positive, otherwise the
  // last tabulated value.  This is the radius of convergence of the
  // equilibrium series for monotone rates.
  double rate_limit() const;

  // True when g(k) = k exactly (enables the exact multinomial canonical
  // sampler).
  bool is_linear() const;

 private:
  std::vector<double> table_;
  double slope_ = 0.0;
  std::int64_t cap_ = 0;
  JumpRateMetadata meta_;
};

// ---------------------------------------------------------------------------
// Ginzburg-Landau single-site potential V = V0 + V1
// ---------------------------------------------------------------------------

class Potential {
 public:
  struct Parts {
    std::function<double(double)> v;         // V
    std::function<double(double)> v_prime;   // V'
    std::function<double(double)> v0;        // uniformly convex part
    std::function<double(double)> v1;        // bounded part (may be null)
    std::function<double(double)> v1_prime;  // (may be null)
    double convexity = 1.0;                  // kappa, V0'' >= kappa > 0
    double v1_sup = 0.0;                     // declared sup |V1|
    double v1_lipschitz = 0.0;               // declared sup |V1'|
  };

  explicit Potential(Parts parts);

  double value(double r) const { return v_(r); }
  double derivative(double r) const { return dv_(r); }
  double v0(double r) const { return v0_(r); }
  double v1(double r) const { return v1_ ? v1_(r) : 0.0; }
  double v1_derivative(double r) const { return dv1_ ? dv1_(r) : 0.0; }

  double convexity() const { return kappa_; }
  double v1_sup_bound() const { return v1_sup_; }
  double v1_lipschitz_bound() const { return v1_lip_; }

 private:
  std::function<double(double)> v_, dv_, v0_, v1_, dv1_;
  double kappa_;
  double v1_sup_;
  double v1_lip_;
};

// ---------------------------------------------------------------------------
// Hypothesis validation
// ---------------------------------------------------------------------------

struct ValidationClause {
  std::string name;
  bool passed;
  // First point at which the clause fails, when meaningful.
  std::optional<double> witness;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;
  bool all_passed() const;
};

// Checks g(0) = 0, positivity, monotonicity, the declared Lipschitz bound
// and the gap condition g(n + n0) - g(n) >= beta on [0, range_max].
// Never throws; failures become report entries.
ValidationReport validate_zrp(const JumpRate& g, std::int64_t range_max);

// Checks V0 convexity (central second differences), |V1| and |V1'| against
// the declared bounds on the given grid.
ValidationReport validate_glk(const Potential& v, const std::vector<double>& grid);

}  // namespace hydrolim
