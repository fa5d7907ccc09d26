#include "plant/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plant/knapsack.hpp"
#include "plant/processes.hpp"

namespace plant {

std::vector<double> compute_theta(const PlantConfig& cfg, std::span<const Count> mu_max,
                                  double V) {
  const int M = cfg.num_materials;
  std::vector<double> theta(M, 0.0);
  for (int m = 0; m < M; ++m) {
    bool any = false;
    double best = 0.0;
    for (int k = 0; k < cfg.num_products; ++k) {
      if (!cfg.uses(m, k)) continue;
      const double b = static_cast<double>(cfg.beta[m][k]);
      double others = 0.0;
      for (int i = 0; i < M; ++i)
        if (i != m) others += static_cast<double>(cfg.beta[i][k] * cfg.a_max[i]);
      const double value = V * (cfg.p_max(k) - cfg.alpha[k]) / b + others / b +
                           2.0 * static_cast<double>(mu_max[m]);
      best = any ? std::max(best, value) : value;
      any = true;
    }
    theta[m] = best;
  }
  return theta;
}

ControllerParams make_controller_params(const Model& model, double V, bool demand_blind,
                                        bool placeholder,
                                        std::optional<std::vector<double>> theta_override,
                                        bool allow_unsafe_theta) {
  if (!(V > 0.0) || !std::isfinite(V))
    throw PlantError(Errc::ValidationError, "V must be a positive finite number");
  ControllerParams params;
  params.V = V;
  params.demand_blind = demand_blind;
  params.placeholder = placeholder;
  params.theta = compute_theta(model.cfg, model.mu_max, V);
  if (demand_blind) {
    for (const auto& y : model.demand)
      if (!y.factor)
        throw PlantError(Errc::ValidationError,
                         "demand-blind pricing needs F_hat on every demand state ('" + y.id +
                             "' has none)");
  }
  if (theta_override) {
    if (static_cast<int>(theta_override->size()) != model.M())
      throw PlantError(Errc::DimensionMismatch, "theta override has wrong length");
    for (int m = 0; m < model.M(); ++m) {
      if ((*theta_override)[m] < params.theta[m] && !allow_unsafe_theta) {
        std::ostringstream os;
        os << "theta[" << m << "] = " << (*theta_override)[m] << " is below the safe value "
           << params.theta[m];
        throw PlantError(Errc::ThetaBelowSafe, os.str());
      }
      if ((*theta_override)[m] < params.theta[m]) params.check_bounds = false;
    }
    params.theta = std::move(*theta_override);
  }
  return params;
}

CountVec ControllerState::actual() const {
  CountVec out(Q.size());
  for (std::size_t m = 0; m < Q.size(); ++m) out[m] = Q[m] - fake[m];
  return out;
}

std::vector<double> queue_ceiling(const Model& model, const ControllerParams& params) {
  std::vector<double> top(model.M());
  for (int m = 0; m < model.M(); ++m)
    top[m] = params.theta[m] + static_cast<double>(model.cfg.a_max[m]);
  return top;
}

bool within_bounds(std::span<const Count> Q, const Model& model, const ControllerParams& params) {
  for (int m = 0; m < model.M(); ++m) {
    if (Q[m] < model.mu_max[m]) return false;
    if (static_cast<double>(Q[m]) > params.theta[m] + static_cast<double>(model.cfg.a_max[m]))
      return false;
  }
  return true;
}

ControllerState init_state(const Model& model, const ControllerParams& params, CountVec Q0) {
  if (static_cast<int>(Q0.size()) != model.M())
    throw PlantError(Errc::DimensionMismatch, "initial queue vector has wrong length");
  if (!within_bounds(Q0, model, params))
    throw PlantError(Errc::InitOutOfRange, "initial queue outside [mu_max, theta + A_max]");
  return ControllerState{std::move(Q0), CountVec(model.M(), 0), 0};
}

ControllerState init_placeholder(const Model& model, const ControllerParams& params,
                                 CountVec Q_actual0) {
  if (static_cast<int>(Q_actual0.size()) != model.M())
    throw PlantError(Errc::DimensionMismatch, "initial queue vector has wrong length");
  CountVec Q(model.M());
  for (int m = 0; m < model.M(); ++m) {
    const double upper = params.theta[m] + static_cast<double>(model.cfg.a_max[m]) -
                         static_cast<double>(model.mu_max[m]);
    if (Q_actual0[m] < 0 || static_cast<double>(Q_actual0[m]) > upper)
      throw PlantError(Errc::InitOutOfRange,
                       "actual initial inventory of material " + std::to_string(m) +
                           " outside [0, theta + A_max - mu_max]");
    Q[m] = Q_actual0[m] + model.mu_max[m];
  }
  return ControllerState{std::move(Q), model.mu_max, 0};
}

std::vector<int> compute_indicators(std::span<const Count> Q, const Model& model) {
  std::vector<int> flag(model.K(), 0);
  for (int k = 0; k < model.K(); ++k)
    for (int m = 0; m < model.M(); ++m)
      if (model.cfg.uses(m, k) && Q[m] < model.mu_max[m]) flag[k] = 1;
  return flag;
}

CountVec decide_purchase(std::span<const Count> Q, const SupplyState& x,
                         const ControllerParams& params, const Model& model) {
  const int M = model.M();
  CountVec A(M, 0);
  std::vector<double> weight(M);
  CountVec ub(M, 0);
  Count full_cost = 0;
  for (int m = 0; m < M; ++m) {
    weight[m] = params.V * static_cast<double>(x.unit_cost[m]) + static_cast<double>(Q[m]) -
                params.theta[m];
    if (weight[m] < 0.0) {
      ub[m] = std::min(model.cfg.a_max[m], x.available[m]);
      full_cost += x.unit_cost[m] * ub[m];
    }
  }
  if (full_cost <= model.cfg.c_max) return ub;

  std::vector<KnapsackItem> items(M);
  for (int m = 0; m < M; ++m) items[m] = KnapsackItem{-weight[m], x.unit_cost[m], ub[m]};
  return solve_bounded_knapsack(items, model.cfg.c_max);
}

PricingDecision decide_pricing(std::span<const Count> Q, const DemandState& y,
                               const ControllerParams& params, const Model& model) {
  const auto& cfg = model.cfg;
  const int K = model.K();
  PricingDecision out{std::vector<int>(K, 0), std::vector<int>(K, 0)};
  const auto blocked = compute_indicators(Q, model);
  for (int k = 0; k < K; ++k) {
    if (blocked[k]) continue;
    double backlog = 0.0;
    for (int m = 0; m < model.M(); ++m)
      backlog += static_cast<double>(cfg.beta[m][k]) * (static_cast<double>(Q[m]) - params.theta[m]);
    const auto& table = params.demand_blind ? y.factor->f_hat[k] : y.F[k];
    int arg = 0;
    double top = 0.0;
    for (int p = 0; p < static_cast<int>(cfg.price_set[k].size()); ++p) {
      const double g = table[p] * (params.V * (cfg.price(k, p) - cfg.alpha[k]) + backlog);
      if (p == 0 || g > top) {
        top = g;
        arg = p;
      }
    }
    if (top > 0.0) {
      out.Z[k] = 1;
      out.price_idx[k] = arg;
    }
  }
  return out;
}

SlotDecision decide(const ControllerState& state, const SupplyState& x, const DemandState& y,
                    const ControllerParams& params, const Model& model) {
  auto pricing = decide_pricing(state.Q, y, params, model);
  return SlotDecision{decide_purchase(state.Q, x, params, model), std::move(pricing.Z),
                      std::move(pricing.price_idx)};
}

namespace {

void check_bounds(const ControllerState& state, const Model& model,
                  const ControllerParams& params) {
  if (!params.check_bounds || within_bounds(state.Q, model, params)) return;
  std::ostringstream os;
  os << "queue bounds violated at slot " << state.slot << ": Q = [";
  for (std::size_t m = 0; m < state.Q.size(); ++m) os << (m ? ", " : "") << state.Q[m];
  os << "]";
  throw PlantError(Errc::InvariantViolation, os.str());
}

}  // namespace

StepRecord apply_demand(ControllerState& state, SlotDecision decision, CountVec D,
                        const SupplyState& x, const ControllerParams& params,
                        const Model& model) {
  const auto& cfg = model.cfg;
  check_bounds(state, model, params);

  CountVec sold(model.K(), 0);
  for (int k = 0; k < model.K(); ++k) sold[k] = decision.Z[k] ? D[k] : 0;
  CountVec need = material_consumption(cfg, sold);
  const CountVec stock = state.actual();
  bool covered = true;
  for (int m = 0; m < model.M(); ++m) covered = covered && need[m] <= stock[m];
  if (!covered) {
    if (params.check_bounds)
      throw PlantError(Errc::InvariantViolation,
                       "demand not coverable by inventory at slot " + std::to_string(state.slot));
    sold = schedule_fulfillment(stock, decision, D, cfg);
    need = material_consumption(cfg, sold);
  }

  StepRecord rec;
  rec.outcome.phi = nominal_profit(decision, D, x, cfg);
  rec.outcome.phi_actual = actual_profit(decision, sold, x, cfg);
  double drift = 0.0;
  for (int m = 0; m < model.M(); ++m) {
    const double diff = static_cast<double>(decision.A[m] - need[m]);
    drift += diff * diff;
  }
  rec.drift_term = 0.5 * drift;

  for (int m = 0; m < model.M(); ++m) state.Q[m] = state.Q[m] - need[m] + decision.A[m];
  ++state.slot;
  check_bounds(state, model, params);

  rec.outcome.D = std::move(D);
  rec.outcome.D_tilde = std::move(sold);
  rec.outcome.mu = std::move(need);
  rec.decision = std::move(decision);
  return rec;
}

StepRecord controller_step(ControllerState& state, const SupplyState& x, const DemandState& y,
                           RngStream& rng, const ControllerParams& params, const Model& model) {
  SlotDecision dec = decide(state, x, y, params, model);
  CountVec D(model.K(), 0);
  for (int k = 0; k < model.K(); ++k)
    if (dec.Z[k]) D[k] = realize_demand(k, dec.price_idx[k], y, model.cfg, rng);
  return apply_demand(state, std::move(dec), std::move(D), x, params, model);
}

}  // namespace plant
