#include "hydrolim/glk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolim/errors.hpp"

namespace hydrolim {

namespace {

void check_checkpoints(double t_end, std::span<const double> checkpoints) {
  double prev = 0.0;
  for (double t : checkpoints) {
    if (t < prev) throw ConfigError("checkpoint times must be non-decreasing");
    if (t > t_end + 1e-12) throw ConfigError("checkpoint beyond t_end");
    prev = t;
  }
}

// Lipschitz bound of V' on [lo, hi], estimated from sampled difference
// quotients.
double vprime_lipschitz(const Potential& v, double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const int samples = 128;
  const double h = (hi - lo) / samples;
  double lip = 0.0;
  double prev = v.derivative(lo);
  for (int i = 1; i <= samples; ++i) {
    const double cur = v.derivative(lo + i * h);
    lip = std::max(lip, std::abs(cur - prev) / h);
    prev = cur;
  }
  return lip;
}

}  // namespace

GlkSimulator::GlkSimulator(GlkConfiguration initial, Potential v, GlkIntegratorOptions opts)
    : config_(std::move(initial)),
      v_(std::move(v)),
      opts_(opts),
      dt_(opts.dt_micro),
      n2_(static_cast<double>(config_.sites()) * static_cast<double>(config_.sites())) {
  if (!(dt_ > 0.0)) throw ConfigError("integrator step must be > 0");
  sqrt_dt_ = std::sqrt(dt_);
  vprime_.resize(static_cast<std::size_t>(config_.sites()));
  noise_.resize(static_cast<std::size_t>(config_.sites()));
  stability_check();
}

void GlkSimulator::stability_check() {
  const auto a = config_.spins();
  double lo = a[0], hi = a[0];
  bool bad = false;
  for (double r : a) {
    bad = bad || !std::isfinite(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (bad) throw NumericError("non-finite spin encountered during integration");
  // Explicit-step stability heuristic dt (2 + 2 Lip(V')) <= 1/2; halve the
  // step until it holds.
  for (int guard = 0; guard < 60; ++guard) {
    const double lip = vprime_lipschitz(v_, lo, hi);
    if (dt_ * (2.0 + 2.0 * lip) <= 0.5) break;
    dt_ *= 0.5;
    sqrt_dt_ = std::sqrt(dt_);
    ++halvings_;
  }
}

void GlkSimulator::em_step(Rng& rng) {
  auto& a = config_.mutable_spins();
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) vprime_[static_cast<std::size_t>(i)] = v_.derivative(a[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n; ++i) noise_[static_cast<std::size_t>(i)] = rng.normal() * sqrt_dt_;

  const double half_dt = 0.5 * dt_;
  // noise_[i] is the edge (i, i+1) increment, entering site i with +1 and
  // site i+1 with -1.
  for (int i = 0; i < n; ++i) {
    const int left = (i == 0) ? n - 1 : i - 1;
    const int right = (i + 1 == n) ? 0 : i + 1;
    a[static_cast<std::size_t>(i)] +=
        half_dt * (vprime_[static_cast<std::size_t>(right)] -
                   2.0 * vprime_[static_cast<std::size_t>(i)] +
                   vprime_[static_cast<std::size_t>(left)]) +
        (noise_[static_cast<std::size_t>(i)] - noise_[static_cast<std::size_t>(left)]);
  }
  micro_time_ += dt_;
  if (++steps_since_check_ >= opts_.stability_check_interval) {
    steps_since_check_ = 0;
    stability_check();
  }
}

double GlkSimulator::advance_to(double t_macro, Rng& rng) {
  while (true) {
    const double target_micro = t_macro * n2_;
    const std::int64_t k = std::llround((target_micro - micro_time_) / dt_);
    if (k <= 0) break;
    const int before_halvings = halvings_;
    for (std::int64_t s = 0; s < k; ++s) {
      em_step(rng);
      // A mid-run halving invalidates the step count; recompute.
      if (halvings_ != before_halvings) break;
    }
    if (halvings_ == before_halvings) break;
  }
  config_.refresh_total();
  return micro_time_ / n2_;
}

namespace {

std::vector<GlkSnapshot> run_single(GlkSimulator& sim, const GlkConfiguration& initial,
                                    double t_end, std::span<const double> checkpoints, Rng& rng,
                                    GlkRunInfo* info) {
  check_checkpoints(t_end, checkpoints);
  const double spin0 = initial.total_spin();

  std::vector<GlkSnapshot> out;
  out.reserve(checkpoints.size());
  for (double tc : checkpoints) {
    const double actual = sim.advance_to(tc, rng);
    out.push_back({tc, actual,
                   std::vector<double>(sim.config().spins().begin(), sim.config().spins().end())});
    if (info) info->max_alignment_error = std::max(info->max_alignment_error, std::abs(actual - tc));
  }
  sim.advance_to(t_end, rng);

  if (info) {
    info->dt_halvings = sim.halvings();
    info->final_dt_micro = sim.dt_micro();
  }
  // Spin conservation: the antisymmetric noise and the Laplacian drift both
  // telescope; only roundoff drift remains.
  const double n = static_cast<double>(initial.sites());
  const double elapsed = std::max(sim.time_macro(), 1e-12);
  const double allowed = 1e-9 * n * std::max(1.0, elapsed);
  GlkConfiguration final_cfg = sim.config();
  final_cfg.refresh_total();
  if (std::abs(final_cfg.total_spin() - spin0) > allowed)
    throw NumericError("total spin drift exceeds tolerance");
  return out;
}

}  // namespace

std::vector<GlkSnapshot> simulate_glk(const GlkConfiguration& initial, const Potential& v,
                                      double t_end, std::span<const double> checkpoints,
                                      double dt_micro, Rng& rng, GlkRunInfo* info) {
  GlkIntegratorOptions opts;
  opts.dt_micro = dt_micro;
  GlkSimulator sim(initial, v, opts);
  return run_single(sim, initial, t_end, checkpoints, rng, info);
}

// ---------------------------------------------------------------------------
// Coupled integrator
// ---------------------------------------------------------------------------

std::vector<CoupledGlkSnapshot> simulate_glk_coupled(const GlkConfiguration& eta0,
                                                     const GlkConfiguration& zeta0,
                                                     const Potential& v, double t_end,
                                                     std::span<const double> checkpoints,
                                                     double dt_micro, Rng& rng,
                                                     GlkRunInfo* info) {
  check_checkpoints(t_end, checkpoints);
  if (eta0.sites() != zeta0.sites())
    throw ConfigError("coupled copies must live on the same lattice");
  const int n = eta0.sites();
  const double n2 = static_cast<double>(n) * static_cast<double>(n);

  std::vector<double> a(eta0.spins().begin(), eta0.spins().end());
  std::vector<double> b(zeta0.spins().begin(), zeta0.spins().end());
  std::vector<double> vpa(static_cast<std::size_t>(n)), vpb(static_cast<std::size_t>(n)),
      noise(static_cast<std::size_t>(n));

  double dt = dt_micro;
  if (!(dt > 0.0)) throw ConfigError("integrator step must be > 0");
  int halvings = 0;
  const int check_interval = 256;

  const auto stability = [&]() {
    double lo = a[0], hi = a[0];
    bool bad = false;
    for (double r : a) {
      bad = bad || !std::isfinite(r);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    for (double r : b) {
      bad = bad || !std::isfinite(r);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (bad) throw NumericError("non-finite spin encountered during coupled integration");
    for (int guard = 0; guard < 60; ++guard) {
      const double lip = vprime_lipschitz(v, lo, hi);
      if (dt * (2.0 + 2.0 * lip) <= 0.5) break;
      dt *= 0.5;
      ++halvings;
    }
  };
  stability();

  double micro_time = 0.0;
  int steps_since_check = 0;
  double max_align = 0.0;

  const auto one_step = [&]() {
    const double sqrt_dt = std::sqrt(dt);
    for (int i = 0; i < n; ++i) {
      vpa[static_cast<std::size_t>(i)] = v.derivative(a[static_cast<std::size_t>(i)]);
      vpb[static_cast<std::size_t>(i)] = v.derivative(b[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) noise[static_cast<std::size_t>(i)] = rng.normal() * sqrt_dt;
    const double half_dt = 0.5 * dt;
    for (int i = 0; i < n; ++i) {
      const int left = (i == 0) ? n - 1 : i - 1;
      const int right = (i + 1 == n) ? 0 : i + 1;
      const double shared =
          noise[static_cast<std::size_t>(i)] - noise[static_cast<std::size_t>(left)];
      a[static_cast<std::size_t>(i)] +=
          half_dt * (vpa[static_cast<std::size_t>(right)] - 2.0 * vpa[static_cast<std::size_t>(i)] +
                     vpa[static_cast<std::size_t>(left)]) +
          shared;
      b[static_cast<std::size_t>(i)] +=
          half_dt * (vpb[static_cast<std::size_t>(right)] - 2.0 * vpb[static_cast<std::size_t>(i)] +
                     vpb[static_cast<std::size_t>(left)]) +
          shared;
    }
    micro_time += dt;
    if (++steps_since_check >= check_interval) {
      steps_since_check = 0;
      stability();
    }
  };

  const auto advance_to = [&](double t_macro) {
    while (true) {
      const std::int64_t k = std::llround((t_macro * n2 - micro_time) / dt);
      if (k <= 0) break;
      const int before = halvings;
      for (std::int64_t s = 0; s < k; ++s) {
        one_step();
        if (halvings != before) break;
      }
      if (halvings == before) break;
    }
    return micro_time / n2;
  };

  std::vector<CoupledGlkSnapshot> out;
  out.reserve(checkpoints.size());
  for (double tc : checkpoints) {
    const double actual = advance_to(tc);
    max_align = std::max(max_align, std::abs(actual - tc));
    out.push_back({tc, actual, a, b});
  }
  advance_to(t_end);

  if (info) {
    info->dt_halvings = halvings;
    info->final_dt_micro = dt;
    info->max_alignment_error = max_align;
  }
  return out;
}

}  // namespace hydrolim
