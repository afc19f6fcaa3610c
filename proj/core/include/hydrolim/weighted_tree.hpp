#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hydrolim {

// Binary indexed tree over nonnegative weights supporting O(log n) point
// updates and O(log n) sampling proportional to weight (prefix-sum descent).
// A running total is maintained incrementally; rebuild() restores it from
// the leaves when floating-point drift accumulates.
class WeightedIndexTree {
 public:
  explicit WeightedIndexTree(std::size_t n);

  void assign(std::span<const double> weights);
  void set(std::size_t i, double w);
  double get(std::size_t i) const { return leaf_[i]; }
  std::size_t size() const { return n_; }
  double total() const { return total_; }

  // Index i with cumulative(i-1) <= u < cumulative(i) for u in [0, total).
  std::size_t sample(double u) const;

  // Exact sum over leaves (linear scan).
  double exact_total() const;
  void rebuild();

 private:
  std::size_t n_;
  std::vector<double> leaf_;
  std::vector<double> tree_;  // 1-based Fenwick array
  double total_ = 0.0;
};

}  // namespace hydrolim
