#include "hydrolim/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hydrolim/errors.hpp"

namespace hydrolim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 32-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre32 {
  std::array<double, 32> x{};
  std::array<double, 32> w{};
  GaussLegendre32() {
    const int n = 32;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[static_cast<std::size_t>(i)] = -z;
      x[static_cast<std::size_t>(n - 1 - i)] = z;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
  }
};

const GaussLegendre32& gauss_legendre() {
  static const GaussLegendre32 table;
  return table;
}

}  // namespace

EquilibriumStructure EquilibriumStructure::for_zrp(JumpRate g) {
  EquilibriumStructure eq;
  eq.kind_ = ModelKind::zrp;
  eq.lambda_star_ = g.rate_limit();
  eq.g_ = std::move(g);
  return eq;
}

EquilibriumStructure EquilibriumStructure::for_glk(Potential v) {
  EquilibriumStructure eq;
  eq.kind_ = ModelKind::glk;
  eq.lambda_star_ = kInf;
  eq.v_ = std::move(v);
  return eq;
}

const JumpRate& EquilibriumStructure::jump_rate() const {
  if (kind_ != ModelKind::zrp) throw std::logic_error("jump_rate() on a GLK equilibrium");
  return *g_;
}

const Potential& EquilibriumStructure::potential() const {
  if (kind_ != ModelKind::glk) throw std::logic_error("potential() on a ZRP equilibrium");
  return *v_;
}

double EquilibriumStructure::flux(double site_value) const {
  if (kind_ == ModelKind::zrp) return (*g_)(static_cast<std::int64_t>(std::llround(site_value)));
  return v_->derivative(site_value);
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

EquilibriumStructure::Moments EquilibriumStructure::zrp_moments(double lam) const {
  const JumpRate& g = *g_;
  if (lam < 0.0) throw std::invalid_argument("zero-range fugacity must be >= 0");
  if (lam == 0.0) return {1.0, 0.0, 0.0};
  if (lam >= lambda_star_ * (1.0 - 1e-12))
    throw NumericError("fugacity at or beyond the series radius of convergence");

  double z = 1.0, m1 = 0.0, m2 = 0.0;
  double term = 1.0;
  const std::int64_t k_floor = static_cast<std::int64_t>(std::ceil(2.0 * M_E * lam)) + 8;
  for (std::int64_t k = 1;; ++k) {
    const double gk = g(k);
    if (!(gk > 0.0)) throw NumericError("jump rate vanishes at an occupied level");
    term *= lam / gk;
    z += term;
    m1 += term * static_cast<double>(k);
    m2 += term * static_cast<double>(k) * static_cast<double>(k);
    const double r = lam / g(k + 1);
    if (k >= k_floor && r < 1.0) {
      // Geometric tail bounds for the zeroth and second weighted sums.
      const double t1 = r / (1.0 - r);
      const double t2 = r / ((1.0 - r) * (1.0 - r));
      const double t3 = r * (1.0 + r) / ((1.0 - r) * (1.0 - r) * (1.0 - r));
      const double kd = static_cast<double>(k);
      const double tail_z = term * t1;
      const double tail_m2 = term * (kd * kd * t1 + 2.0 * kd * t2 + t3);
      if (tail_z < 1e-15 * z && tail_m2 < 1e-13 * std::max(m2, 1.0)) break;
    }
    if (k > 20'000'000) throw NumericError("equilibrium series did not converge");
  }
  const double mean = m1 / z;
  const double var = m2 / z - mean * mean;
  return {z, mean, var};
}

double EquilibriumStructure::glk_mode(double lam) const {
  const Potential& V = *v_;
  const auto slope = [&](double r) {
    const double h = 1e-5;
    return (V.v0(r + h) - V.v0(r - h)) / (2.0 * h) - lam;
  };
  const double guess = lam / V.convexity();
  double lo = guess - 1.0, hi = guess + 1.0;
  double step = 1.0;
  while (slope(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e12) throw NumericError("failed to bracket the Gibbs mode (left)");
  }
  step = 1.0;
  while (slope(hi) < 0.0) {
    hi += step;
    step *= 2.0;
    if (step > 1e12) throw NumericError("failed to bracket the Gibbs mode (right)");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EquilibriumStructure::Moments EquilibriumStructure::glk_moments(double lam) const {
  const Potential& V = *v_;
  const double kappa = V.convexity();
  const double c = glk_mode(lam);
  const double e0 = lam * c - V.value(c);
  // Window wide enough that the Gaussian-dominated tail is below 1e-18
  // relative to the peak even after the V1 perturbation.
  const double w = std::sqrt(2.0 * (45.0 + 2.0 * V.v1_sup_bound()) / kappa) + 1.0;
  const auto& gl = gauss_legendre();

  double prev_z = 0.0, prev_c1 = 0.0;
  bool have_prev = false;
  for (int panels = 16; panels <= 4096; panels *= 2) {
    double z = 0.0, c1 = 0.0, c2 = 0.0;  // centered moments around c
    const double h = 2.0 * w / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = c - w + p * h;
      for (int q = 0; q < 32; ++q) {
        const double r = a + 0.5 * h * (1.0 + gl.x[static_cast<std::size_t>(q)]);
        const double f =
            std::exp(lam * r - V.value(r) - e0) * (0.5 * h * gl.w[static_cast<std::size_t>(q)]);
        const double d = r - c;
        z += f;
        c1 += f * d;
        c2 += f * d * d;
      }
    }
    if (have_prev && std::abs(z - prev_z) <= 1e-14 * z &&
        std::abs(c1 - prev_c1) <= 1e-13 * (std::abs(c1) + z)) {
      const double mean_off = c1 / z;
      const double var = c2 / z - mean_off * mean_off;
      return {z * std::exp(e0), c + mean_off, var};
    }
    prev_z = z;
    prev_c1 = c1;
    have_prev = true;
  }
  throw NumericError("Ginzburg-Landau quadrature did not stabilize");
}

EquilibriumStructure::Moments EquilibriumStructure::moments(double lam) const {
  return kind_ == ModelKind::zrp ? zrp_moments(lam) : glk_moments(lam);
}

double EquilibriumStructure::partition(double lambda) const { return moments(lambda).z; }
double EquilibriumStructure::mean_density(double lambda) const { return moments(lambda).mean; }
double EquilibriumStructure::density_variance(double lambda) const { return moments(lambda).var; }

// ---------------------------------------------------------------------------
// sigma = R^{-1}
// ---------------------------------------------------------------------------

double EquilibriumStructure::sigma(double rho) const {
  const double tol = 1e-10 * std::max(1.0, std::abs(rho));

  double lo, hi;
  if (kind_ == ModelKind::zrp) {
    if (rho < 0.0) throw std::invalid_argument("zero-range density must be >= 0");
    if (rho == 0.0) return 0.0;
    lo = 0.0;
    if (std::isinf(lambda_star_)) {
      hi = 1.0;
      while (mean_density(hi) < rho) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericError("density not reachable by any finite fugacity");
      }
    } else {
      double gap = 0.5 * lambda_star_;
      hi = lambda_star_ - gap;
      while (mean_density(hi) < rho) {
        gap *= 0.5;
        hi = lambda_star_ - gap;
        if (gap < 1e-13 * lambda_star_)
          throw NumericError("density above the supremum of the mean-density map");
      }
    }
  } else {
    double half = 10.0;
    lo = rho - half;
    hi = rho + half;
    while (mean_density(lo) > rho) {
      half *= 2.0;
      lo = rho - half;
      if (half > 1e12) throw NumericError("failed to bracket sigma (left)");
    }
    half = 10.0;
    while (mean_density(hi) < rho) {
      half *= 2.0;
      hi = rho + half;
      if (half > 1e12) throw NumericError("failed to bracket sigma (right)");
    }
  }

  // Bisection to a rough width, then Newton polish through dR/dlambda.
  double lam = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    lam = 0.5 * (lo + hi);
    const double r = mean_density(lam);
    if (std::abs(r - rho) <= tol) return lam;
    (r < rho ? lo : hi) = lam;
    if (hi - lo < 1e-6 * (1.0 + std::abs(hi))) break;
  }
  for (int i = 0; i < 8; ++i) {
    const Moments m = moments(lam);
    if (std::abs(m.mean - rho) <= tol) return lam;
    const double dr = kind_ == ModelKind::zrp ? (lam > 0.0 ? m.var / lam : 0.0) : m.var;
    double next = dr > 0.0 ? lam - (m.mean - rho) / dr : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double r_next = mean_density(next);
    (r_next < rho ? lo : hi) = next;
    lam = next;
  }
  if (std::abs(mean_density(lam) - rho) <= tol) return lam;
  throw NumericError("sigma inversion failed to reach tolerance");
}

double EquilibriumStructure::sigma_prime(double rho) const {
  if (kind_ == ModelKind::zrp) {
    // dR/dlambda = var/lambda, so sigma' = lambda/var; the lambda -> 0 limit
    // is g(1).
    if (rho <= 0.0) return (*g_)(1);
    const double lam = sigma(rho);
    if (lam < 1e-9) return (*g_)(1);
    return lam / moments(lam).var;
  }
  const double lam = sigma(rho);
  return 1.0 / moments(lam).var;
}

// ---------------------------------------------------------------------------
// Single-site sampling
// ---------------------------------------------------------------------------

double EquilibriumStructure::sample_site(double lambda, Rng& rng) const {
  if (kind_ == ModelKind::zrp) {
    if (lambda == 0.0) return 0.0;
    const JumpRate& g = *g_;
    const double z = zrp_moments(lambda).z;
    const double target = rng.uniform01() * z;
    double term = 1.0, acc = 1.0;
    std::int64_t k = 0;
    while (acc < target) {
      ++k;
      term *= lambda / g(k);
      acc += term;
      if (k > 50'000'000) throw NumericError("zero-range site sampler ran off the series");
    }
    return static_cast<double>(k);
  }

  // Rejection from the Gaussian envelope built on the kappa-convex minorant
  // of V0 around the tilted mode c (V0'(c) = lambda).  The acceptance
  // probability is at least exp(-2 sup|V1|).
  const Potential& V = *v_;
  const double kappa = V.convexity();
  const double c = glk_mode(lambda);
  const double v0c = V.v0(c);
  const double inv_sqrt_kappa = 1.0 / std::sqrt(kappa);
  for (int trial = 0; trial < 1'000'000; ++trial) {
    const double r = c + rng.normal() * inv_sqrt_kappa;
    const double d = r - c;
    double log_accept =
        lambda * d + v0c - V.v0(r) + 0.5 * kappa * d * d - V.v1(r) - V.v1_sup_bound();
    if (log_accept > 0.0) log_accept = 0.0;  // mode roundoff
    if (std::log(rng.uniform01()) < log_accept) return r;
  }
  throw NumericError("Gaussian-envelope rejection sampler starved after 1e6 trials");
}

// ---------------------------------------------------------------------------
// LocalGibbsSpec
// ---------------------------------------------------------------------------

LocalGibbsSpec::LocalGibbsSpec(std::shared_ptr<const EquilibriumStructure> eq,
                               TorusLattice lattice,
                               const std::function<double(double)>& profile)
    : eq_(std::move(eq)), lattice_(lattice) {
  fugacity_.resize(static_cast<std::size_t>(lattice_.sites));
  target_mean_.resize(static_cast<std::size_t>(lattice_.sites));
  for (int x = 0; x < lattice_.sites; ++x) {
    const double rho = profile(lattice_.embed(x));
    target_mean_[static_cast<std::size_t>(x)] = rho;
    fugacity_[static_cast<std::size_t>(x)] = eq_->sigma(rho);
  }
}

LocalGibbsSpec::LocalGibbsSpec(std::shared_ptr<const EquilibriumStructure> eq,
                               TorusLattice lattice, const MacroProfile& profile)
    : LocalGibbsSpec(std::move(eq), lattice,
                     [&profile](double u) { return profile.value_at(u); }) {}

ZrpConfiguration LocalGibbsSpec::sample_zrp(Rng& rng) const {
  if (eq_->kind() != ModelKind::zrp) throw std::logic_error("sample_zrp on a GLK spec");
  std::vector<std::int64_t> occ(static_cast<std::size_t>(lattice_.sites));
  for (int x = 0; x < lattice_.sites; ++x) {
    occ[static_cast<std::size_t>(x)] = static_cast<std::int64_t>(
        eq_->sample_site(fugacity_[static_cast<std::size_t>(x)], rng));
  }
  return ZrpConfiguration(std::move(occ));
}

GlkConfiguration LocalGibbsSpec::sample_glk(Rng& rng) const {
  if (eq_->kind() != ModelKind::glk) throw std::logic_error("sample_glk on a ZRP spec");
  std::vector<double> spins(static_cast<std::size_t>(lattice_.sites));
  for (int x = 0; x < lattice_.sites; ++x) {
    spins[static_cast<std::size_t>(x)] =
        eq_->sample_site(fugacity_[static_cast<std::size_t>(x)], rng);
  }
  return GlkConfiguration(std::move(spins));
}

// ---------------------------------------------------------------------------
// Canonical sampling
// ---------------------------------------------------------------------------

std::vector<std::int64_t> sample_canonical_zrp(const EquilibriumStructure& eq, int ell,
                                               double mean_value, Rng& rng,
                                               std::int64_t mcmc_steps, SplitChainDiag* diag) {
  if (eq.kind() != ModelKind::zrp) throw std::logic_error("sample_canonical_zrp on a GLK model");
  if (ell < 1) throw ConfigError("canonical block radius must be >= 1");
  const int L = 2 * ell + 1;
  const double total_d = mean_value * L;
  const std::int64_t total = std::llround(total_d);
  if (std::abs(total_d - static_cast<double>(total)) > 1e-9 * std::max(1.0, std::abs(total_d)))
    throw ConfigError("canonical mass m*(2l+1) must be an integer");
  if (total < 0) throw ConfigError("canonical mass must be >= 0");

  std::vector<std::int64_t> occ(static_cast<std::size_t>(L), 0);
  if (total == 0) return occ;

  const JumpRate& g = eq.jump_rate();
  if (g.is_linear()) {
    // Product Poisson conditioned on the total is multinomial with uniform
    // cell probabilities.
    for (std::int64_t t = 0; t < total; ++t) {
      occ[rng.uniform_index(static_cast<std::uint64_t>(L))] += 1;
    }
    return occ;
  }

  // General rates: single-particle-move Metropolis.  On the fixed-mass shell
  // the weights are prod 1/g(.)!, so a move i -> j is accepted with
  // probability min(1, g(occ_i) / g(occ_j + 1)).
  for (int i = 0; i < L; ++i) {
    occ[static_cast<std::size_t>(i)] = total / L + (i < total % L ? 1 : 0);
  }
  const std::int64_t floor_steps = 50LL * L * L;
  const std::int64_t steps = std::max(mcmc_steps, floor_steps);

  double gsum = 0.0;
  std::vector<double> batch_means;
  double batch_acc = 0.0;
  const std::int64_t batch_len = std::max<std::int64_t>(steps / 32, 1);
  if (diag) {
    for (std::int64_t k : occ) gsum += g(k);
  }

  for (std::int64_t s = 0; s < steps; ++s) {
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(L)));
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(L)));
    const double u = rng.uniform01();
    auto& oi = occ[static_cast<std::size_t>(i)];
    auto& oj = occ[static_cast<std::size_t>(j)];
    // A self-move is the identity; executing it would also feed stale
    // values into the incremental gsum update below.
    if (i != j && oi >= 1) {
      const double denom = g(oj + 1);
      if (!(denom > 0.0)) throw NumericError("jump rate vanishes inside the canonical sampler");
      const double a = g(oi) / denom;
      if (u < a) {
        if (diag) gsum += g(oi - 1) + g(oj + 1) - g(oi) - g(oj);
        oi -= 1;
        oj += 1;
      }
    }
    if (diag) {
      batch_acc += gsum / L;
      if ((s + 1) % batch_len == 0) {
        batch_means.push_back(batch_acc / static_cast<double>(batch_len));
        batch_acc = 0.0;
      }
    }
  }

  if (diag && batch_means.size() >= 4) {
    const std::size_t half = batch_means.size() / 2;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t b = 0; b < half; ++b) m1 += batch_means[b];
    for (std::size_t b = half; b < batch_means.size(); ++b) m2 += batch_means[b];
    m1 /= static_cast<double>(half);
    m2 /= static_cast<double>(batch_means.size() - half);
    double mean_all = 0.0;
    for (double v : batch_means) mean_all += v;
    mean_all /= static_cast<double>(batch_means.size());
    double var = 0.0;
    for (double v : batch_means) var += (v - mean_all) * (v - mean_all);
    var /= static_cast<double>(batch_means.size());
    diag->first_half_mean = m1;
    diag->second_half_mean = m2;
    diag->stderr_estimate = std::sqrt(var / static_cast<double>(batch_means.size()));
  }
  return occ;
}

std::vector<double> sample_canonical_glk(const EquilibriumStructure& eq, int ell,
                                         double mean_value, Rng& rng, std::int64_t mcmc_steps,
                                         SplitChainDiag* diag) {
  if (eq.kind() != ModelKind::glk) throw std::logic_error("sample_canonical_glk on a ZRP model");
  if (ell < 1) throw ConfigError("canonical block radius must be >= 1");
  const int L = 2 * ell + 1;
  std::vector<double> vals(static_cast<std::size_t>(L), mean_value);

  const Potential& V = eq.potential();
  const double scale = 1.0 / std::sqrt(V.convexity());
  const std::int64_t floor_steps = 50LL * L * L;
  const std::int64_t steps = std::max(mcmc_steps, floor_steps);

  double vpsum = 0.0;
  std::vector<double> batch_means;
  double batch_acc = 0.0;
  const std::int64_t batch_len = std::max<std::int64_t>(steps / 32, 1);
  if (diag) {
    for (double r : vals) vpsum += V.derivative(r);
  }

  for (std::int64_t s = 0; s < steps; ++s) {
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(L)));
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(L)));
    const double delta = rng.normal() * scale;
    const double u = rng.uniform01();
    if (i != j) {
      auto& vi = vals[static_cast<std::size_t>(i)];
      auto& vj = vals[static_cast<std::size_t>(j)];
      // Mass-conserving pairwise exchange; the fugacity factor cancels.
      const double dh = V.value(vi + delta) + V.value(vj - delta) - V.value(vi) - V.value(vj);
      if (dh <= 0.0 || u < std::exp(-dh)) {
        if (diag) {
          vpsum += V.derivative(vi + delta) + V.derivative(vj - delta) - V.derivative(vi) -
                   V.derivative(vj);
        }
        vi += delta;
        vj -= delta;
      }
    }
    if (diag) {
      batch_acc += vpsum / L;
      if ((s + 1) % batch_len == 0) {
        batch_means.push_back(batch_acc / static_cast<double>(batch_len));
        batch_acc = 0.0;
      }
    }
  }

  if (diag && batch_means.size() >= 4) {
    const std::size_t half = batch_means.size() / 2;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t b = 0; b < half; ++b) m1 += batch_means[b];
    for (std::size_t b = half; b < batch_means.size(); ++b) m2 += batch_means[b];
    m1 /= static_cast<double>(half);
    m2 /= static_cast<double>(batch_means.size() - half);
    double mean_all = 0.0;
    for (double v : batch_means) mean_all += v;
    mean_all /= static_cast<double>(batch_means.size());
    double var = 0.0;
    for (double v : batch_means) var += (v - mean_all) * (v - mean_all);
    var /= static_cast<double>(batch_means.size());
    diag->first_half_mean = m1;
    diag->second_half_mean = m2;
    diag->stderr_estimate = std::sqrt(var / static_cast<double>(batch_means.size()));
  }
  return vals;
}

MonteCarloEstimate ensembles_error(const EquilibriumStructure& eq, int ell, double mean_value,
                                   int samples, Rng& rng) {
  if (samples < 8) throw ConfigError("ensembles_error needs at least 8 samples");
  const double sigma_m = eq.sigma(mean_value);
  const int L = 2 * ell + 1;

  std::vector<double> values(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    double flux_mean = 0.0;
    if (eq.kind() == ModelKind::zrp) {
      const auto occ = sample_canonical_zrp(eq, ell, mean_value, rng);
      const JumpRate& g = eq.jump_rate();
      for (std::int64_t k : occ) flux_mean += g(k);
    } else {
      const auto vals = sample_canonical_glk(eq, ell, mean_value, rng);
      const Potential& V = eq.potential();
      for (double r : vals) flux_mean += V.derivative(r);
    }
    values[static_cast<std::size_t>(s)] = flux_mean / L - sigma_m;
  }

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(samples);

  // Bootstrap standard error of the mean.
  const int resamples = 1000;
  double bs_mean = 0.0, bs_sq = 0.0;
  for (int b = 0; b < resamples; ++b) {
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
      acc += values[rng.uniform_index(static_cast<std::uint64_t>(samples))];
    }
    acc /= static_cast<double>(samples);
    bs_mean += acc;
    bs_sq += acc * acc;
  }
  bs_mean /= resamples;
  const double bs_var = std::max(0.0, bs_sq / resamples - bs_mean * bs_mean);
  return {mean, std::sqrt(bs_var), samples};
}

// ---------------------------------------------------------------------------
// SigmaInterpolant
// ---------------------------------------------------------------------------

SigmaInterpolant::SigmaInterpolant(const EquilibriumStructure& eq, double lo, double hi,
                                   int points) {
  if (points < 3) throw std::invalid_argument("SigmaInterpolant needs >= 3 points");
  if (!(hi > lo)) hi = lo + 1e-9;
  double pad = 1e-3 * (hi - lo) + 1e-12;
  lo_ = lo - pad;
  hi_ = hi + pad;
  if (eq.kind() == ModelKind::zrp && lo_ < 0.0) lo_ = 0.0;
  step_ = (hi_ - lo_) / (points - 1);
  values_.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    values_[static_cast<std::size_t>(i)] = eq.sigma(lo_ + i * step_);
  }
}

double SigmaInterpolant::operator()(double rho) const {
  if (rho <= lo_) return values_.front();
  if (rho >= hi_) return values_.back();
  const double pos = (rho - lo_) / step_;
  const std::size_t i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double SigmaInterpolant::sup_derivative() const {
  double sup = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    sup = std::max(sup, std::abs(values_[i + 1] - values_[i]) / step_);
  }
  return sup;
}

}  // namespace hydrolim
