#include "hydrolim/lattice.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hydrolim {

TorusLattice::TorusLattice(int n) : sites(n) {
  if (n < 2) throw std::invalid_argument("TorusLattice requires at least 2 sites");
}

ZrpConfiguration::ZrpConfiguration(std::vector<std::int64_t> occupation)
    : occ_(std::move(occupation)) {
  if (occ_.size() < 2) throw std::invalid_argument("ZrpConfiguration needs >= 2 sites");
  for (std::int64_t k : occ_) {
    if (k < 0) throw std::invalid_argument("negative occupation number");
    total_ += k;
  }
}

ZrpConfiguration ZrpConfiguration::zeros(int sites) {
  return ZrpConfiguration(std::vector<std::int64_t>(static_cast<std::size_t>(sites), 0));
}

void ZrpConfiguration::add_particle(int x) {
  occ_[static_cast<std::size_t>(x)] += 1;
  total_ += 1;
}

void ZrpConfiguration::move_particle(int from, int to) {
  auto& src = occ_[static_cast<std::size_t>(from)];
  if (src < 1) throw std::logic_error("move_particle from an empty site");
  src -= 1;
  occ_[static_cast<std::size_t>(to)] += 1;
}

bool ZrpConfiguration::mass_consistent() const {
  std::int64_t sum = std::accumulate(occ_.begin(), occ_.end(), std::int64_t{0});
  return sum == total_;
}

GlkConfiguration::GlkConfiguration(std::vector<double> spins) : spin_(std::move(spins)) {
  if (spin_.size() < 2) throw std::invalid_argument("GlkConfiguration needs >= 2 sites");
  for (double r : spin_) {
    if (!std::isfinite(r)) throw std::invalid_argument("non-finite spin value");
  }
  refresh_total();
}

GlkConfiguration GlkConfiguration::constant(int sites, double value) {
  return GlkConfiguration(std::vector<double>(static_cast<std::size_t>(sites), value));
}

void GlkConfiguration::refresh_total() {
  total_ = std::accumulate(spin_.begin(), spin_.end(), 0.0);
}

bool GlkConfiguration::spin_consistent(double tol) const {
  const double sum = std::accumulate(spin_.begin(), spin_.end(), 0.0);
  return std::abs(sum - total_) <= tol * static_cast<double>(spin_.size());
}

}  // namespace hydrolim
