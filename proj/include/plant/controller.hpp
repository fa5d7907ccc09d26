#pragma once

#include <optional>
#include <span>
#include <vector>

#include "plant/model.hpp"
#include "plant/rng.hpp"

namespace plant {

struct ControllerParams {
  double V = 1.0;
  std::vector<double> theta;  // per-material queue-centering thresholds
  bool demand_blind = false;  // price from F_hat instead of F(., y)
  bool placeholder = false;   // start with mu_max fake units per queue
  bool check_bounds = true;   // throw InvariantViolation on a queue-bound breach
};

// theta_m = max over products k using m of
//   V (P_k,max - alpha_k) / beta_mk + sum_{i != m} beta_ik A_i,max / beta_mk + 2 mu_m,max
// and 0 for materials no product uses.
std::vector<double> compute_theta(const PlantConfig& cfg, std::span<const Count> mu_max,
                                  double V);

// Builds parameters with theta from compute_theta, or from `theta_override`
// when given. Overrides below the safe value are rejected unless
// `allow_unsafe_theta`, in which case bound checks are disabled.
ControllerParams make_controller_params(const Model& model, double V, bool demand_blind = false,
                                        bool placeholder = false,
                                        std::optional<std::vector<double>> theta_override = {},
                                        bool allow_unsafe_theta = false);

struct ControllerState {
  CountVec Q;     // control backlog, including fake units in placeholder mode
  CountVec fake;  // place-holder offset per material
  Count slot = 0;

  CountVec actual() const;
};

// Direct start from Q(0); requires mu_max <= Q(0) <= theta + A_max.
ControllerState init_state(const Model& model, const ControllerParams& params, CountVec Q0);

// Place-holder start: Q = Q_actual(0) + mu_max, with
// 0 <= Q_actual(0) <= theta + A_max - mu_max.
ControllerState init_placeholder(const Model& model, const ControllerParams& params,
                                 CountVec Q_actual0);

// Upper buffer bound theta_m + A_max,m.
std::vector<double> queue_ceiling(const Model& model, const ControllerParams& params);

// 1 for product k iff some material it uses is below mu_max.
std::vector<int> compute_indicators(std::span<const Count> Q, const Model& model);

// Minimizes V c(A, x) + sum_m A_m (Q_m - theta_m) over the integer purchase set.
CountVec decide_purchase(std::span<const Count> Q, const SupplyState& x,
                         const ControllerParams& params, const Model& model);

struct PricingDecision {
  std::vector<int> Z;
  std::vector<int> price_idx;
};

// Per product: blocked by the edge indicator, else the price maximizing
// F(p) (V (p - alpha) + sum_m beta_mk (Q_m - theta_m)), offered only if that
// maximum is strictly positive. Ties go to the lowest price.
PricingDecision decide_pricing(std::span<const Count> Q, const DemandState& y,
                               const ControllerParams& params, const Model& model);

SlotDecision decide(const ControllerState& state, const SupplyState& x, const DemandState& y,
                    const ControllerParams& params, const Model& model);

struct StepRecord {
  SlotDecision decision;
  SlotOutcome outcome;
  double drift_term = 0.0;  // 0.5 * sum_m (A_m - mu_m)^2
};

// Fulfills demand D against the decision and advances the state by one slot.
StepRecord apply_demand(ControllerState& state, SlotDecision decision, CountVec D,
                        const SupplyState& x, const ControllerParams& params,
                        const Model& model);

// One full slot: purchase, price, draw demand, fulfill, update queues.
StepRecord controller_step(ControllerState& state, const SupplyState& x, const DemandState& y,
                           RngStream& rng, const ControllerParams& params, const Model& model);

// True iff mu_max <= Q <= theta + A_max componentwise.
bool within_bounds(std::span<const Count> Q, const Model& model, const ControllerParams& params);

}  // namespace plant
