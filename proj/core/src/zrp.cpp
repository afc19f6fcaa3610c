#include "hydrolim/zrp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolim/errors.hpp"

namespace hydrolim {

namespace {

// Rate-cache audit cadence; the tree total is compared against an exact
// leaf sum and rebuilt when the relative drift exceeds 1e-9.
constexpr std::int64_t kRebuildCheckInterval = 1 << 18;

void check_checkpoints(double t_end, std::span<const double> checkpoints) {
  double prev = 0.0;
  for (double t : checkpoints) {
    if (t < prev) throw ConfigError("checkpoint times must be non-decreasing");
    if (t > t_end + 1e-12) throw ConfigError("checkpoint beyond t_end");
    prev = t;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ZrpSimulator
// ---------------------------------------------------------------------------

ZrpSimulator::ZrpSimulator(ZrpConfiguration initial, TransitionKernel kernel, JumpRate g)
    : config_(std::move(initial)),
      kernel_(std::move(kernel)),
      g_(std::move(g)),
      lattice_(config_.sites()),
      rates_(static_cast<std::size_t>(config_.sites())),
      n2_(static_cast<double>(config_.sites()) * static_cast<double>(config_.sites())) {
  std::vector<double> w(static_cast<std::size_t>(config_.sites()));
  for (int x = 0; x < config_.sites(); ++x) {
    w[static_cast<std::size_t>(x)] = g_(config_.at(x));
  }
  rates_.assign(w);
}

void ZrpSimulator::refresh_rate(int x) {
  rates_.set(static_cast<std::size_t>(x), g_(config_.at(x)));
  ++sets_since_check_;
}

void ZrpSimulator::maybe_rebuild() {
  if (sets_since_check_ < kRebuildCheckInterval) return;
  sets_since_check_ = 0;
  const double exact = rates_.exact_total();
  if (std::abs(exact - rates_.total()) > 1e-9 * std::max(exact, 1.0)) rates_.rebuild();
}

std::optional<double> ZrpSimulator::step(Rng& rng) {
  const double bulk = rates_.total();
  if (!(bulk > 0.0)) return std::nullopt;
  const double dt = rng.exponential(n2_ * bulk);
  const int x = static_cast<int>(rates_.sample(rng.uniform01() * bulk));
  const int y = lattice_.wrap(x + kernel_.sample_displacement(rng));
  config_.move_particle(x, y);
  refresh_rate(x);
  refresh_rate(y);
  maybe_rebuild();
  time_ += dt;
  ++events_;
  return dt;
}

void ZrpSimulator::advance_to(double t_macro, Rng& rng) {
  while (time_ < t_macro) {
    const double bulk = rates_.total();
    if (!(bulk > 0.0)) {
      time_ = t_macro;  // absorbing configuration
      return;
    }
    const double dt = rng.exponential(n2_ * bulk);
    if (time_ + dt > t_macro) {
      // The residual wait past the checkpoint is redrawn later; exponential
      // waits are memoryless so the law is unchanged.
      time_ = t_macro;
      return;
    }
    time_ += dt;
    const int x = static_cast<int>(rates_.sample(rng.uniform01() * bulk));
    const int y = lattice_.wrap(x + kernel_.sample_displacement(rng));
    config_.move_particle(x, y);
    refresh_rate(x);
    refresh_rate(y);
    maybe_rebuild();
    ++events_;
  }
}

std::vector<ZrpSnapshot> simulate_zrp(const ZrpConfiguration& initial,
                                      const TransitionKernel& kernel, const JumpRate& g,
                                      double t_end, std::span<const double> checkpoints,
                                      Rng& rng) {
  check_checkpoints(t_end, checkpoints);
  ZrpSimulator sim(initial, kernel, g);
  const std::int64_t mass0 = initial.total_mass();

  std::vector<ZrpSnapshot> out;
  out.reserve(checkpoints.size());
  for (double tc : checkpoints) {
    sim.advance_to(tc, rng);
    out.push_back({tc, std::vector<std::int64_t>(sim.config().occupation().begin(),
                                                 sim.config().occupation().end())});
  }
  sim.advance_to(t_end, rng);

  if (sim.config().total_mass() != mass0 || !sim.config().mass_consistent())
    throw NumericError("zero-range mass conservation violated");
  return out;
}

// ---------------------------------------------------------------------------
// CoupledZrpSimulator
// ---------------------------------------------------------------------------

CoupledZrpSimulator::CoupledZrpSimulator(ZrpConfiguration eta, ZrpConfiguration zeta,
                                         TransitionKernel kernel, JumpRate g)
    : eta_(std::move(eta)),
      zeta_(std::move(zeta)),
      kernel_(std::move(kernel)),
      g_(std::move(g)),
      lattice_(eta_.sites()),
      weights_(static_cast<std::size_t>(eta_.sites())),
      n2_(static_cast<double>(eta_.sites()) * static_cast<double>(eta_.sites())) {
  if (eta_.sites() != zeta_.sites())
    throw ConfigError("coupled copies must live on the same lattice");
  std::vector<double> w(static_cast<std::size_t>(eta_.sites()));
  for (int x = 0; x < eta_.sites(); ++x) {
    w[static_cast<std::size_t>(x)] = std::max(g_(eta_.at(x)), g_(zeta_.at(x)));
  }
  weights_.assign(w);
}

void CoupledZrpSimulator::refresh_weight(int x) {
  weights_.set(static_cast<std::size_t>(x), std::max(g_(eta_.at(x)), g_(zeta_.at(x))));
  ++sets_since_check_;
  if (sets_since_check_ >= kRebuildCheckInterval) {
    sets_since_check_ = 0;
    const double exact = weights_.exact_total();
    if (std::abs(exact - weights_.total()) > 1e-9 * std::max(exact, 1.0)) weights_.rebuild();
  }
}

std::optional<double> CoupledZrpSimulator::step(Rng& rng) {
  const double bulk = weights_.total();
  if (!(bulk > 0.0)) return std::nullopt;
  const double dt = rng.exponential(n2_ * bulk);
  const int x = static_cast<int>(weights_.sample(rng.uniform01() * bulk));

  // Split the site's activity: [0, c) moves both copies, [c, g_eta) moves
  // eta alone, [g_eta, max) moves zeta alone, with c = min(g_eta, g_zeta).
  const double ge = g_(eta_.at(x));
  const double gz = g_(zeta_.at(x));
  const double c = std::min(ge, gz);
  const double u = rng.uniform01() * std::max(ge, gz);
  const int y = lattice_.wrap(x + kernel_.sample_displacement(rng));

  if (u < c) {
    eta_.move_particle(x, y);
    zeta_.move_particle(x, y);
  } else if (u < ge) {
    eta_.move_particle(x, y);
  } else {
    zeta_.move_particle(x, y);
  }
  refresh_weight(x);
  refresh_weight(y);
  time_ += dt;
  return dt;
}

void CoupledZrpSimulator::advance_to(double t_macro, Rng& rng) {
  while (time_ < t_macro) {
    const double bulk = weights_.total();
    if (!(bulk > 0.0)) {
      time_ = t_macro;
      return;
    }
    const double dt = rng.exponential(n2_ * bulk);
    if (time_ + dt > t_macro) {
      time_ = t_macro;
      return;
    }
    time_ += dt;
    const int x = static_cast<int>(weights_.sample(rng.uniform01() * bulk));
    const double ge = g_(eta_.at(x));
    const double gz = g_(zeta_.at(x));
    const double c = std::min(ge, gz);
    const double u = rng.uniform01() * std::max(ge, gz);
    const int y = lattice_.wrap(x + kernel_.sample_displacement(rng));
    if (u < c) {
      eta_.move_particle(x, y);
      zeta_.move_particle(x, y);
    } else if (u < ge) {
      eta_.move_particle(x, y);
    } else {
      zeta_.move_particle(x, y);
    }
    refresh_weight(x);
    refresh_weight(y);
  }
}

double CoupledZrpSimulator::l1_distance() const {
  std::int64_t sum = 0;
  for (int x = 0; x < eta_.sites(); ++x) {
    sum += std::abs(eta_.at(x) - zeta_.at(x));
  }
  return static_cast<double>(sum) / eta_.sites();
}

std::vector<CoupledZrpSnapshot> simulate_zrp_coupled(const ZrpConfiguration& eta0,
                                                     const ZrpConfiguration& zeta0,
                                                     const TransitionKernel& kernel,
                                                     const JumpRate& g, double t_end,
                                                     std::span<const double> checkpoints,
                                                     Rng& rng) {
  check_checkpoints(t_end, checkpoints);
  CoupledZrpSimulator sim(eta0, zeta0, kernel, g);
  const std::int64_t mass_eta = eta0.total_mass();
  const std::int64_t mass_zeta = zeta0.total_mass();

  std::vector<CoupledZrpSnapshot> out;
  out.reserve(checkpoints.size());
  for (double tc : checkpoints) {
    sim.advance_to(tc, rng);
    out.push_back({tc,
                   std::vector<std::int64_t>(sim.eta().occupation().begin(),
                                             sim.eta().occupation().end()),
                   std::vector<std::int64_t>(sim.zeta().occupation().begin(),
                                             sim.zeta().occupation().end())});
  }
  sim.advance_to(t_end, rng);

  if (sim.eta().total_mass() != mass_eta || sim.zeta().total_mass() != mass_zeta ||
      !sim.eta().mass_consistent() || !sim.zeta().mass_consistent())
    throw NumericError("coupled zero-range mass conservation violated");
  return out;
}

}  // namespace hydrolim
