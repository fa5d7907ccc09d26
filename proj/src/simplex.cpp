#include <algorithm>
#include <cmath>

#include "plant/lp.hpp"

namespace plant {

int LinearProgram::add_var(double obj, double ub) {
  objective.push_back(obj);
  upper.push_back(ub);
  return num_vars() - 1;
}

void LinearProgram::add_row(std::vector<double> coef, RowSense sense, double rhs) {
  coef.resize(objective.size(), 0.0);
  rows.push_back(Row{std::move(coef), sense, rhs});
}

namespace {

constexpr double kEps = 1e-11;

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(int i, int j) { return data_[i * (n_ + 1) + j]; }
  double at(int i, int j) const { return data_[i * (n_ + 1) + j]; }
  double& rhs(int i) { return at(i, n_); }
  // Row m_ holds reduced costs; its rhs cell holds minus the objective value.
  double& reduced(int j) { return at(m_, j); }

  int rows() const { return m_; }
  int cols() const { return n_; }

  void pivot(int l, int e) {
    const double piv = at(l, e);
    for (int j = 0; j <= n_; ++j) at(l, j) /= piv;
    for (int i = 0; i <= m_; ++i) {
      if (i == l) continue;
      const double f = at(i, e);
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(l, j);
      at(i, e) = 0.0;
    }
  }

 private:
  int m_;
  int n_;
  std::vector<double> data_;
};

struct Simplex {
  Tableau tab;
  std::vector<int> basis;
  std::vector<char> allowed;
  int pivots = 0;

  void load_costs(const std::vector<double>& cost) {
    const int m = tab.rows();
    const int n = tab.cols();
    for (int j = 0; j < n; ++j) {
      double r = cost[j];
      for (int i = 0; i < m; ++i) r -= cost[basis[i]] * tab.at(i, j);
      tab.reduced(j) = r;
    }
    double value = 0.0;
    for (int i = 0; i < m; ++i) value += cost[basis[i]] * tab.rhs(i);
    tab.at(m, n) = -value;
  }

  double value() { return -tab.at(tab.rows(), tab.cols()); }

  // Returns false when unbounded.
  bool run() {
    const int m = tab.rows();
    const int n = tab.cols();
    for (;;) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (allowed[j] && tab.reduced(j) > kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        const double a = tab.at(i, enter);
        if (a <= kEps) continue;
        const double ratio = tab.rhs(i) / a;
        if (leave < 0 || ratio < best - kEps ||
            (ratio <= best + kEps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      tab.pivot(leave, enter);
      basis[leave] = enter;
      ++pivots;
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars();
  std::vector<LinearProgram::Row> rows;
  rows.reserve(lp.rows.size() + n);
  for (const auto& r : lp.rows) {
    if (static_cast<int>(r.coef.size()) != n)
      throw PlantError(Errc::ValidationError, "LP row width differs from variable count");
    rows.push_back(r);
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) {
      std::vector<double> coef(n, 0.0);
      coef[j] = 1.0;
      rows.push_back({std::move(coef), RowSense::LessEq, lp.upper[j]});
    }
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      for (double& c : r.coef) c = -c;
      r.rhs = -r.rhs;
      if (r.sense == RowSense::LessEq)
        r.sense = RowSense::GreaterEq;
      else if (r.sense == RowSense::GreaterEq)
        r.sense = RowSense::LessEq;
    }
  }

  const int m = static_cast<int>(rows.size());
  int num_slack = 0;
  int num_art = 0;
  for (const auto& r : rows) {
    if (r.sense != RowSense::Equal) ++num_slack;
    if (r.sense != RowSense::LessEq) ++num_art;
  }
  const int art_begin = n + num_slack;
  const int cols = art_begin + num_art;

  Simplex sx{Tableau(m, cols), std::vector<int>(m, -1), std::vector<char>(cols, 1), 0};
  int slack = n;
  int art = art_begin;
  for (int i = 0; i < m; ++i) {
    const auto& r = rows[i];
    for (int j = 0; j < n; ++j) sx.tab.at(i, j) = r.coef[j];
    sx.tab.rhs(i) = r.rhs;
    if (r.sense == RowSense::LessEq) {
      sx.tab.at(i, slack) = 1.0;
      sx.basis[i] = slack++;
    } else {
      if (r.sense == RowSense::GreaterEq) sx.tab.at(i, slack++) = -1.0;
      sx.tab.at(i, art) = 1.0;
      sx.basis[i] = art++;
    }
  }

  if (num_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (int j = art_begin; j < cols; ++j) phase1[j] = -1.0;
    sx.load_costs(phase1);
    sx.run();
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
    if (sx.value() < -1e-9 * scale)
      throw PlantError(Errc::Infeasible, "linear program has no feasible point");

    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (sx.basis[i] < art_begin) continue;
      for (int j = 0; j < art_begin; ++j) {
        if (std::abs(sx.tab.at(i, j)) > 1e-9) {
          sx.tab.pivot(i, j);
          sx.basis[i] = j;
          ++sx.pivots;
          break;
        }
      }
    }
    for (int j = art_begin; j < cols; ++j) sx.allowed[j] = 0;
  }

  std::vector<double> cost(cols, 0.0);
  for (int j = 0; j < n; ++j) cost[j] = lp.objective[j];
  sx.load_costs(cost);
  if (!sx.run()) throw PlantError(Errc::Unbounded, "linear program is unbounded");

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (sx.basis[i] < n) sol.x[sx.basis[i]] = std::max(0.0, sx.tab.rhs(i));
  sol.value = 0.0;
  for (int j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
  sol.pivots = sx.pivots;
  return sol;
}

}  // namespace plant
