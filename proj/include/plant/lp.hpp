#pragma once

#include <limits>
#include <vector>

#include "plant/error.hpp"

namespace plant {

enum class RowSense { LessEq, GreaterEq, Equal };

// Dense LP: maximize objective . x subject to rows, 0 <= x <= upper.
struct LinearProgram {
  struct Row {
    std::vector<double> coef;  // one entry per variable
    RowSense sense = RowSense::LessEq;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<double> upper;  // +inf when unbounded above
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_var(double obj = 0.0, double ub = std::numeric_limits<double>::infinity());
  // Coefficients are padded with zeros to the current variable count.
  void add_row(std::vector<double> coef, RowSense sense, double rhs);
};

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

// Two-phase primal simplex on a dense tableau with Bland's rule. Throws
// Infeasible or Unbounded.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace plant
