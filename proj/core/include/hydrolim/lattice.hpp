#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hydrolim {

// One-dimensional discrete torus with N sites embedded in [0, 1).
struct TorusLattice {
  explicit TorusLattice(int n);

  int sites;

  int wrap(int x) const {
    int m = x % sites;
    return m < 0 ? m + sites : m;
  }

  // Macroscopic coordinate x/N of a site.
  double embed(int x) const { return static_cast<double>(wrap(x)) / sites; }
};

// Occupation-number configuration for the zero-range process.  The total
// mass is cached and kept in sync by every mutator; integer arithmetic makes
// conservation bit-exact.
class ZrpConfiguration {
 public:
  explicit ZrpConfiguration(std::vector<std::int64_t> occupation);
  static ZrpConfiguration zeros(int sites);

  int sites() const { return static_cast<int>(occ_.size()); }
  std::int64_t at(int x) const { return occ_[static_cast<std::size_t>(x)]; }
  std::int64_t total_mass() const { return total_; }
  std::span<const std::int64_t> occupation() const { return occ_; }

  void add_particle(int x);
  // Moves one particle; requires at(from) >= 1.
  void move_particle(int from, int to);

  // Recomputes the sum and compares with the cached total.
  bool mass_consistent() const;

 private:
  std::vector<std::int64_t> occ_;
  std::int64_t total_ = 0;
};

// Continuous spin configuration for the Ginzburg-Landau model.
class GlkConfiguration {
 public:
  explicit GlkConfiguration(std::vector<double> spins);
  static GlkConfiguration constant(int sites, double value);

  int sites() const { return static_cast<int>(spin_.size()); }
  double at(int x) const { return spin_[static_cast<std::size_t>(x)]; }
  double total_spin() const { return total_; }
  std::span<const double> spins() const { return spin_; }

  // Hot-path access for the integrator; call refresh_total() afterwards.
  std::vector<double>& mutable_spins() { return spin_; }
  void refresh_total();

  // True when the cached total matches a fresh sum to within tol * sites.
  bool spin_consistent(double tol) const;

 private:
  std::vector<double> spin_;
  double total_ = 0.0;
};

}  // namespace hydrolim
