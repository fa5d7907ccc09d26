#include "plant/knapsack.hpp"

#include <algorithm>
#include <cmath>

namespace plant {

CountVec solve_bounded_knapsack(std::span<const KnapsackItem> items, Count capacity) {
  const std::size_t n = items.size();
  CountVec q(n, 0);
  if (n == 0 || capacity < 0) return q;

  Count useful = 0;
  for (const auto& it : items) useful += it.weight * it.bound;
  const Count cap = std::min(capacity, useful);
  const std::size_t width = static_cast<std::size_t>(cap) + 1;

  // best[i][b]: optimum over items i..n-1 with budget b.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(width, 0.0));
  for (std::size_t i = n; i-- > 0;) {
    const auto& it = items[i];
    for (Count b = 0; b <= cap; ++b) {
      double top = best[i + 1][b];
      const Count most = it.weight > 0 ? std::min(it.bound, b / it.weight) : it.bound;
      for (Count a = 1; a <= most; ++a) {
        const double v = static_cast<double>(a) * it.value + best[i + 1][b - a * it.weight];
        top = std::max(top, v);
      }
      best[i][b] = top;
    }
  }

  // Forward pass: the smallest quantity that still reaches the optimum.
  Count budget = cap;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& it = items[i];
    const double target = best[i][budget];
    const double tol = 1e-9 * std::max(1.0, std::abs(target));
    const Count most = it.weight > 0 ? std::min(it.bound, budget / it.weight) : it.bound;
    for (Count a = 0; a <= most; ++a) {
      const double v = static_cast<double>(a) * it.value + best[i + 1][budget - a * it.weight];
      if (v >= target - tol) {
        q[i] = a;
        budget -= a * it.weight;
        break;
      }
    }
  }
  return q;
}

}  // namespace plant
