#include "hydrolim/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hydrolim/errors.hpp"

namespace hydrolim {

// ---------------------------------------------------------------------------
// TransitionKernel
// ---------------------------------------------------------------------------

TransitionKernel::TransitionKernel(std::vector<KernelEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("transition kernel has no entries");
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.displacement == 0) throw ConfigError("transition kernel entry with displacement 0");
    if (!(e.probability > 0.0)) throw ConfigError("transition kernel probability must be > 0");
    sum += e.probability;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("transition kernel probabilities sum to " + std::to_string(sum));
  // Normalize away the residual rounding so the CDF ends exactly at 1.
  double acc = 0.0;
  cdf_.reserve(entries_.size());
  for (auto& e : entries_) {
    e.probability /= sum;
    acc += e.probability;
    cdf_.push_back(acc);
    mean_ += e.probability * e.displacement;
    second_ += e.probability * e.displacement * e.displacement;
    max_range_ = std::max(max_range_, std::abs(e.displacement));
  }
  cdf_.back() = 1.0;
}

TransitionKernel TransitionKernel::nearest_neighbour_symmetric() {
  return TransitionKernel({{+1, 0.5}, {-1, 0.5}});
}

int TransitionKernel::sample_displacement(Rng& rng) const {
  const double u = rng.uniform01();
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    if (u < cdf_[i]) return entries_[i].displacement;
  }
  return entries_.back().displacement;
}

bool TransitionKernel::moments_consistent() const {
  double m = 0.0, s = 0.0;
  for (const auto& e : entries_) {
    m += e.probability * e.displacement;
    s += e.probability * e.displacement * e.displacement;
  }
  return std::abs(m - mean_) <= 1e-12 && std::abs(s - second_) <= 1e-12 * std::max(1.0, second_);
}

// ---------------------------------------------------------------------------
// JumpRate
// ---------------------------------------------------------------------------

JumpRate::JumpRate(const std::function<double(std::int64_t)>& form, std::int64_t table_cap,
                   JumpRateMetadata meta)
    : cap_(table_cap), meta_(meta) {
  if (table_cap < 2) throw ConfigError("jump rate table cap must be >= 2");
  table_.resize(static_cast<std::size_t>(table_cap) + 1);
  for (std::int64_t k = 0; k <= table_cap; ++k) {
    const double v = form(k);
    if (!std::isfinite(v)) throw ConfigError("jump rate evaluates to a non-finite value");
    table_[static_cast<std::size_t>(k)] = v;
  }
  slope_ = table_[static_cast<std::size_t>(table_cap)] -
           table_[static_cast<std::size_t>(table_cap) - 1];
  if (slope_ < 0.0) slope_ = 0.0;  // monotone extension only
}

double JumpRate::rate_limit() const {
  if (slope_ > 1e-15) return std::numeric_limits<double>::infinity();
  return table_.back();
}

bool JumpRate::is_linear() const {
  for (std::int64_t k = 0; k <= cap_; ++k) {
    if (table_[static_cast<std::size_t>(k)] != static_cast<double>(k)) return false;
  }
  return slope_ == 1.0;
}

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

Potential::Potential(Parts parts)
    : v_(std::move(parts.v)),
      dv_(std::move(parts.v_prime)),
      v0_(std::move(parts.v0)),
      v1_(std::move(parts.v1)),
      dv1_(std::move(parts.v1_prime)),
      kappa_(parts.convexity),
      v1_sup_(parts.v1_sup),
      v1_lip_(parts.v1_lipschitz) {
  if (!v_ || !dv_ || !v0_) throw ConfigError("potential requires V, V' and V0 evaluators");
  if (!(kappa_ > 0.0)) throw ConfigError("potential convexity constant must be > 0");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

bool ValidationReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ValidationClause& c) { return c.passed; });
}

ValidationReport validate_zrp(const JumpRate& g, std::int64_t range_max) {
  ValidationReport report;
  const auto& meta = g.metadata();
  if (range_max < meta.gap_n0 + 2) range_max = meta.gap_n0 + 2;

  ValidationClause zero{"g(0) = 0", true, {}, ""};
  if (std::abs(g(0)) > 1e-12) {
    zero.passed = false;
    zero.witness = 0.0;
    zero.detail = "g(0) = " + std::to_string(g(0));
  }
  report.clauses.push_back(zero);

  ValidationClause positive{"g(n) > 0 for n > 0", true, {}, ""};
  for (std::int64_t n = 1; n <= range_max; ++n) {
    if (!(g(n) > 0.0)) {
      positive.passed = false;
      positive.witness = static_cast<double>(n);
      positive.detail = "g(" + std::to_string(n) + ") = " + std::to_string(g(n));
      break;
    }
  }
  report.clauses.push_back(positive);

  ValidationClause monotone{"g non-decreasing", true, {}, ""};
  for (std::int64_t n = 0; n < range_max; ++n) {
    if (g(n + 1) < g(n) - 1e-12) {
      monotone.passed = false;
      monotone.witness = static_cast<double>(n);
      monotone.detail = "g decreases between " + std::to_string(n) + " and " + std::to_string(n + 1);
      break;
    }
  }
  report.clauses.push_back(monotone);

  ValidationClause lipschitz{"increments bounded by declared g*", true, {}, ""};
  for (std::int64_t n = 0; n < range_max; ++n) {
    const double inc = std::abs(g(n + 1) - g(n));
    if (inc > meta.lipschitz + 1e-12) {
      lipschitz.passed = false;
      lipschitz.witness = static_cast<double>(n);
      lipschitz.detail = "|g(n+1)-g(n)| = " + std::to_string(inc) + " at n = " + std::to_string(n);
      break;
    }
  }
  report.clauses.push_back(lipschitz);

  ValidationClause gap{"gap: g(n+n0) - g(n) >= beta", true, {}, ""};
  for (std::int64_t n = 0; n <= range_max - meta.gap_n0; ++n) {
    const double diff = g(n + meta.gap_n0) - g(n);
    if (diff < meta.gap_beta - 1e-12) {
      gap.passed = false;
      gap.witness = static_cast<double>(n);
      gap.detail = "g(" + std::to_string(n + meta.gap_n0) + ") - g(" + std::to_string(n) +
                   ") = " + std::to_string(diff) + " < beta = " + std::to_string(meta.gap_beta);
      break;
    }
  }
  report.clauses.push_back(gap);

  return report;
}

ValidationReport validate_glk(const Potential& v, const std::vector<double>& grid) {
  ValidationReport report;
  const double h = 1e-3;

  ValidationClause convex{"V0 second difference >= kappa", true, {}, ""};
  for (double r : grid) {
    const double d2 = (v.v0(r + h) - 2.0 * v.v0(r) + v.v0(r - h)) / (h * h);
    if (d2 < v.convexity() - 1e-6) {
      convex.passed = false;
      convex.witness = r;
      convex.detail = "second difference " + std::to_string(d2) + " at r = " + std::to_string(r);
      break;
    }
  }
  report.clauses.push_back(convex);

  ValidationClause sup{"|V1| within declared sup bound", true, {}, ""};
  for (double r : grid) {
    if (std::abs(v.v1(r)) > v.v1_sup_bound() + 1e-9) {
      sup.passed = false;
      sup.witness = r;
      sup.detail = "|V1| = " + std::to_string(std::abs(v.v1(r))) + " at r = " + std::to_string(r);
      break;
    }
  }
  report.clauses.push_back(sup);

  ValidationClause lip{"|V1'| within declared Lipschitz bound", true, {}, ""};
  for (double r : grid) {
    if (std::abs(v.v1_derivative(r)) > v.v1_lipschitz_bound() + 1e-9) {
      lip.passed = false;
      lip.witness = r;
      lip.detail = "|V1'| = " + std::to_string(std::abs(v.v1_derivative(r))) + " at r = " + std::to_string(r);
      break;
    }
  }
  report.clauses.push_back(lip);

  return report;
}

}  // namespace hydrolim
