#pragma once

#include "plant/model.hpp"
#include "plant/rng.hpp"

namespace plant::test {

inline PlantConfig i1_config() {
  PlantConfig cfg;
  cfg.num_materials = 1;
  cfg.num_products = 1;
  cfg.beta = {{1}};
  cfg.alpha = {0.0};
  cfg.price_set = {{1.0, 2.0}};
  cfg.d_max = {2};
  cfg.a_max = {2};
  cfg.c_max = 2;
  return cfg;
}

inline SupplyState i1_supply() { return {"x", {1}, {2}}; }
inline DemandState i1_demand() { return {"y", {{2.0, 1.0}}, std::nullopt}; }

inline Model i1() { return validate_config(i1_config(), {i1_supply()}, {i1_demand()}); }

inline Model zero_demand() {
  return validate_config(i1_config(), {i1_supply()}, {DemandState{"y0", {{0.0, 0.0}}, {}}});
}

// Random instance with at most 2 materials, 2 products, 2 states per process
// and 2 prices per product.
inline Model random_tiny(RngStream& rng) {
  auto pick = [&](Count lo, Count hi) {
    return lo + static_cast<Count>(rng.uniform() * static_cast<double>(hi - lo + 1));
  };
  PlantConfig cfg;
  cfg.num_materials = static_cast<int>(pick(1, 2));
  cfg.num_products = static_cast<int>(pick(1, 2));
  const int M = cfg.num_materials;
  const int K = cfg.num_products;
  cfg.beta.assign(M, CountVec(K, 0));
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) cfg.beta[m][k] = pick(0, 2);
    cfg.beta[pick(0, M - 1)][k] = pick(1, 2);
  }
  for (int k = 0; k < K; ++k) {
    cfg.alpha.push_back(static_cast<double>(pick(0, 1)));
    const double p1 = static_cast<double>(pick(1, 4));
    if (rng.uniform() < 0.5)
      cfg.price_set.push_back({p1});
    else
      cfg.price_set.push_back({p1, p1 + static_cast<double>(pick(1, 3))});
    cfg.d_max.push_back(pick(1, 2));
  }
  for (int m = 0; m < M; ++m) cfg.a_max.push_back(pick(1, 2));
  cfg.c_max = pick(1, 4);

  std::vector<SupplyState> supply;
  const int nx = static_cast<int>(pick(1, 2));
  for (int x = 0; x < nx; ++x) {
    SupplyState s{"x" + std::to_string(x), {}, {}};
    for (int m = 0; m < M; ++m) {
      s.unit_cost.push_back(pick(0, 2));
      s.available.push_back(pick(0, cfg.a_max[m]));
    }
    supply.push_back(std::move(s));
  }
  std::vector<DemandState> demand;
  const int ny = static_cast<int>(pick(1, 2));
  for (int y = 0; y < ny; ++y) {
    DemandState d{"y" + std::to_string(y), {}, {}};
    for (int k = 0; k < K; ++k) {
      std::vector<double> row;
      double prev = static_cast<double>(cfg.d_max[k]);
      for (std::size_t p = 0; p < cfg.price_set[k].size(); ++p) {
        prev = rng.uniform() * prev;
        row.push_back(prev);
      }
      d.F.push_back(std::move(row));
    }
    demand.push_back(std::move(d));
  }
  return validate_config(std::move(cfg), std::move(supply), std::move(demand));
}

inline std::vector<double> random_simplex(RngStream& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) s += (v = 0.2 + rng.uniform());
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace plant::test
