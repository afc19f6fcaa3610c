#include "hydrolim/weighted_tree.hpp"

#include <bit>
#include <stdexcept>

namespace hydrolim {

WeightedIndexTree::WeightedIndexTree(std::size_t n)
    : n_(n), leaf_(n, 0.0), tree_(n + 1, 0.0) {
  if (n == 0) throw std::invalid_argument("WeightedIndexTree needs at least one leaf");
}

void WeightedIndexTree::assign(std::span<const double> weights) {
  if (weights.size() != n_) throw std::invalid_argument("weight count mismatch");
  for (std::size_t i = 0; i < n_; ++i) leaf_[i] = weights[i];
  rebuild();
}

void WeightedIndexTree::rebuild() {
  total_ = 0.0;
  for (std::size_t i = 1; i <= n_; ++i) tree_[i] = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    total_ += leaf_[i];
    std::size_t j = i + 1;
    tree_[j] += leaf_[i];
    // Propagate to the parent covering range once, lazily via the classic
    // in-place Fenwick build below.
  }
  // In-place O(n) Fenwick build: push each node's sum to its parent.
  for (std::size_t i = 1; i <= n_; ++i) {
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n_) tree_[parent] += tree_[i];
  }
}

void WeightedIndexTree::set(std::size_t i, double w) {
  const double delta = w - leaf_[i];
  if (delta == 0.0) return;
  leaf_[i] = w;
  total_ += delta;
  for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
}

double WeightedIndexTree::exact_total() const {
  double sum = 0.0;
  for (double w : leaf_) sum += w;
  return sum;
}

std::size_t WeightedIndexTree::sample(double u) const {
  // Standard Fenwick descent: find the smallest index whose prefix sum
  // exceeds u.
  std::size_t pos = 0;
  std::size_t mask = std::bit_floor(n_);
  double rem = u;
  while (mask != 0) {
    const std::size_t next = pos + mask;
    if (next <= n_ && tree_[next] <= rem) {
      pos = next;
      rem -= tree_[next];
    }
    mask >>= 1;
  }
  // pos is now the count of full prefixes below u; it equals the 0-based
  // sampled index.  Skip any zero-weight leaves hit by boundary roundoff.
  std::size_t idx = pos;
  while (idx < n_ && leaf_[idx] <= 0.0) ++idx;
  if (idx >= n_) {
    // u landed at or past the float total; take the last positive leaf.
    idx = n_ - 1;
    while (idx > 0 && leaf_[idx] <= 0.0) --idx;
  }
  return idx;
}

}  // namespace hydrolim
