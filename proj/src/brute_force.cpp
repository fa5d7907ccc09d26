#include <algorithm>
#include <cmath>
#include <limits>

#include "plant/oracles.hpp"

namespace plant {

namespace {

// One decision group (a supply state, or a product in a demand state) and the
// per-option contribution to profit and to each material balance a_hat - mu_hat.
struct Group {
  std::vector<double> value;
  std::vector<std::vector<double>> flow;  // [option][m]
};

constexpr double kFeasTol = 1e-12;
constexpr std::size_t kMaxPurePolicies = 2'000'000;

}  // namespace

BruteForceResult brute_force_opt(const Model& model, std::span<const double> pi_x,
                                 std::span<const double> pi_y, double grid_step) {
  const auto& cfg = model.cfg;
  const int M = model.M();
  const int K = model.K();
  const int nx = static_cast<int>(model.supply.size());
  const int ny = static_cast<int>(model.demand.size());
  if (nx > 2 || ny > 2 || M > 2 || K > 2)
    throw PlantError(Errc::InstanceTooLarge,
                     "brute force handles at most 2 states per process and 2 materials/products");
  for (int k = 0; k < K; ++k)
    if (cfg.price_set[k].size() > 3)
      throw PlantError(Errc::InstanceTooLarge, "brute force handles at most 3 prices per product");
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw PlantError(Errc::ValidationError, "grid step must lie in (0, 1]");

  std::vector<Group> groups;
  for (int x = 0; x < nx; ++x) {
    Group g;
    for (const auto& a : enumerate_actions(cfg, model.supply[x], 1000)) {
      g.value.push_back(-pi_x[x] * static_cast<double>(purchase_cost(a, model.supply[x])));
      std::vector<double> f(M);
      for (int m = 0; m < M; ++m) f[m] = pi_x[x] * static_cast<double>(a[m]);
      g.flow.push_back(std::move(f));
    }
    groups.push_back(std::move(g));
  }
  for (int k = 0; k < K; ++k) {
    for (int y = 0; y < ny; ++y) {
      Group g;
      for (int o = 0; o < num_price_options(cfg, k); ++o) {
        const auto opt = price_option(o);
        const double f = opt.z ? model.demand[y].F[k][opt.price_idx] : 0.0;
        const double margin = opt.z ? cfg.price(k, opt.price_idx) - cfg.alpha[k] : 0.0;
        g.value.push_back(pi_y[y] * margin * f);
        std::vector<double> fl(M);
        for (int m = 0; m < M; ++m) fl[m] = -pi_y[y] * static_cast<double>(cfg.beta[m][k]) * f;
        g.flow.push_back(std::move(fl));
      }
      groups.push_back(std::move(g));
    }
  }

  std::size_t total = 1;
  for (const auto& g : groups) {
    total *= g.value.size();
    if (total > kMaxPurePolicies)
      throw PlantError(Errc::InstanceTooLarge, "too many pure policies to enumerate");
  }

  std::vector<double> grid;
  const int steps = static_cast<int>(std::floor(1.0 / grid_step + 1e-9));
  for (int i = 1; i < steps; ++i) grid.push_back(i * grid_step);

  double best_pure = -std::numeric_limits<double>::infinity();
  double best_mixed = -std::numeric_limits<double>::infinity();
  const std::size_t G = groups.size();
  std::vector<std::size_t> pick(G, 0);
  std::vector<double> flow(M);

  for (std::size_t iter = 0; iter < total; ++iter) {
    double value = 0.0;
    std::fill(flow.begin(), flow.end(), 0.0);
    for (std::size_t g = 0; g < G; ++g) {
      value += groups[g].value[pick[g]];
      for (int m = 0; m < M; ++m) flow[m] += groups[g].flow[pick[g]][m];
    }
    bool feasible = true;
    for (int m = 0; m < M; ++m) feasible = feasible && flow[m] >= -kFeasTol;
    if (feasible) best_pure = std::max(best_pure, value);

    // Mix weight w on an alternative option of one group.
    for (std::size_t g = 0; g < G; ++g) {
      const auto& grp = groups[g];
      for (std::size_t o = 0; o < grp.value.size(); ++o) {
        if (o == pick[g]) continue;
        const double dv = grp.value[o] - grp.value[pick[g]];
        double lo = 0.0;
        double hi = 1.0;
        for (int m = 0; m < M && lo <= hi; ++m) {
          const double df = grp.flow[o][m] - grp.flow[pick[g]][m];
          // flow[m] + w * df >= 0
          if (df > 0.0)
            lo = std::max(lo, -flow[m] / df);
          else if (df < 0.0)
            hi = std::min(hi, flow[m] / -df);
          else if (flow[m] < -kFeasTol)
            hi = -1.0;
        }
        if (lo > hi) continue;
        auto consider = [&](double w) {
          if (w <= 0.0 || w >= 1.0 || w < lo || w > hi) return;
          best_mixed = std::max(best_mixed, value + w * dv);
        };
        consider(lo);
        consider(hi);
        for (double w : grid) consider(w);
      }
    }

    for (std::size_t g = G; g-- > 0;) {
      if (++pick[g] < groups[g].value.size()) break;
      pick[g] = 0;
    }
  }

  BruteForceResult out;
  out.value = std::max(best_pure, best_mixed);
  out.pure = best_pure >= best_mixed - 1e-9;
  return out;
}

}  // namespace plant
