#pragma once

#include <span>

#include "plant/model.hpp"

namespace plant {

struct KnapsackItem {
  double value = 0.0;  // gain per unit
  Count weight = 0;    // integer cost per unit
  Count bound = 0;     // max units
};

// Exact bounded knapsack by dynamic programming over the residual budget:
// maximize sum value_i * q_i subject to sum weight_i * q_i <= capacity and
// 0 <= q_i <= bound_i. Returns the lexicographically smallest optimal q.
// O(capacity * sum bound_i) time.
CountVec solve_bounded_knapsack(std::span<const KnapsackItem> items, Count capacity);

}  // namespace plant
