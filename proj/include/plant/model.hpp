#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plant/error.hpp"

namespace plant {

using Count = std::int64_t;
using CountVec = std::vector<Count>;

// Static problem data. Indices are [material][product] for beta and
// [product][price index] for price tables.
struct PlantConfig {
  int num_materials = 0;
  int num_products = 0;
  std::vector<CountVec> beta;                  // units of material m per unit of product k
  std::vector<double> alpha;                   // assembly cost per unit of product k
  std::vector<std::vector<double>> price_set;  // ascending, non-negative
  CountVec d_max;                              // per-slot demand cap
  CountVec a_max;                              // per-slot purchase cap
  Count c_max = 0;                             // per-slot budget in cost units

  double p_max(int k) const { return price_set[k].back(); }
  double price(int k, int idx) const { return price_set[k][idx]; }
  bool uses(int m, int k) const { return beta[m][k] > 0; }
};

struct SupplyState {
  std::string id;
  CountVec unit_cost;
  CountVec available;
};

// F[k][p] = h[k] * f_hat[k][p]
struct DemandFactorization {
  std::vector<double> h;
  std::vector<std::vector<double>> f_hat;
};

struct DemandState {
  std::string id;
  std::vector<std::vector<double>> F;  // expected demand per (product, price index)
  std::optional<DemandFactorization> factor;
};

// A validated plant with precomputed per-material peak consumption.
struct Model {
  PlantConfig cfg;
  std::vector<SupplyState> supply;
  std::vector<DemandState> demand;
  CountVec mu_max;
  std::vector<std::string> warnings;

  int M() const { return cfg.num_materials; }
  int K() const { return cfg.num_products; }
  int supply_index(const std::string& id) const;
  int demand_index(const std::string& id) const;
};

struct SlotDecision {
  CountVec A;                  // purchases
  std::vector<int> Z;          // 1 if product offered
  std::vector<int> price_idx;  // index into price_set[k]; meaningful where Z=1
};

struct SlotOutcome {
  CountVec D;        // realized demand
  CountVec D_tilde;  // fulfilled demand
  CountVec mu;       // material consumption sum_k beta[m][k] * D_tilde[k]
  double phi = 0.0;
  double phi_actual = 0.0;
};

SlotDecision idle_decision(const PlantConfig& cfg);

Model validate_config(PlantConfig cfg, std::vector<SupplyState> supply,
                      std::vector<DemandState> demand);

CountVec compute_mu_max(const PlantConfig& cfg);

Count purchase_cost(std::span<const Count> A, const SupplyState& x);

// -c(A,x) + sum_k Z_k * D_k * (P_k - alpha_k)
double nominal_profit(const SlotDecision& dec, std::span<const Count> D, const SupplyState& x,
                      const PlantConfig& cfg);

// Same formula with the fulfilled demand in place of D.
double actual_profit(const SlotDecision& dec, std::span<const Count> D_tilde,
                     const SupplyState& x, const PlantConfig& cfg);

CountVec material_consumption(const PlantConfig& cfg, std::span<const Count> sold);

// Chooses D_tilde with 0 <= D_tilde <= Z*D and sum_k beta*D_tilde <= Q. Exact
// when stock covers everything; otherwise greedy by unit margin (P - alpha),
// ties by ascending product index.
CountVec schedule_fulfillment(std::span<const Count> Q, const SlotDecision& dec,
                              std::span<const Count> D, const PlantConfig& cfg);

// Q'[m] = max(Q[m] - consumption[m], 0) + A[m]
CountVec queue_update(std::span<const Count> Q, std::span<const Count> D_tilde,
                      std::span<const Count> A, const PlantConfig& cfg);

// Lyapunov function 0.5 * sum_m (Q_m - theta_m)^2.
double lyapunov(std::span<const Count> Q, std::span<const double> theta);

// Per-slot drift constant 0.5 * sum_m max(A_max^2, mu_max^2).
double drift_constant(const PlantConfig& cfg, std::span<const Count> mu_max);

}  // namespace plant
