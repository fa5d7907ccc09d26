#pragma once

#include <span>
#include <vector>

#include "plant/lp.hpp"
#include "plant/model.hpp"

namespace plant {

inline constexpr std::size_t kMaxActionsPerState = 100'000;

// All integer purchase vectors allowed in supply state x (caps, availability,
// budget), in lexicographic order. Throws ActionSpaceTooLarge past `limit`.
std::vector<CountVec> enumerate_actions(const PlantConfig& cfg, const SupplyState& x,
                                        std::size_t limit = kMaxActionsPerState);

// Pricing option for one product: option 0 is "not offered", option j + 1 is
// "offered at price_set[k][j]".
struct PriceOption {
  int z = 0;
  int price_idx = 0;
};

inline int num_price_options(const PlantConfig& cfg, int k) {
  return static_cast<int>(cfg.price_set[k].size()) + 1;
}
inline PriceOption price_option(int option) {
  return option == 0 ? PriceOption{0, 0} : PriceOption{1, option - 1};
}

// Variables of the stationary profit LP: one probability per (supply state,
// purchase vector) and one per (product, demand state, price option).
struct ProfitLp {
  LinearProgram lp;
  std::vector<double> pi_x;
  std::vector<double> pi_y;
  std::vector<std::vector<CountVec>> actions;           // [x][a]
  std::vector<std::vector<int>> action_var;             // [x][a]
  std::vector<std::vector<std::vector<int>>> option_var;  // [k][y][option]
};

// Maximize -c_hat + r_hat subject to a_hat_m >= mu_hat_m, with each state's
// decision distribution normalized.
ProfitLp build_profit_lp(const Model& model, std::span<const double> pi_x,
                         std::span<const double> pi_y);

struct PurchaseChoice {
  CountVec a;
  double prob = 0.0;
};

// Stationary randomized policy that depends only on the current (X, Y).
struct OraclePolicy {
  std::vector<double> pi_x;
  std::vector<double> pi_y;
  std::vector<std::vector<PurchaseChoice>> purchase_dist;  // [x]
  std::vector<std::vector<std::vector<double>>> price_dist;  // [k][y][option]

  double c_hat = 0.0;
  double r_hat = 0.0;
  std::vector<double> a_hat;
  std::vector<double> mu_hat;
  double phi_opt = 0.0;
};

// Recomputes c_hat, r_hat, a_hat, mu_hat and phi_opt = r_hat - c_hat.
void compute_aggregates(OraclePolicy& policy, const Model& model);

// Per-(k, y) conditional revenue and demand: r_k(y), d_k(y).
struct PricingAggregate {
  double revenue = 0.0;
  double demand = 0.0;
};
PricingAggregate pricing_aggregate(const std::vector<double>& option_probs, int k,
                                   const DemandState& y, const PlantConfig& cfg);

// Normalizes the LP mass into conditional distributions, trims surplus
// purchases so that a_hat equals mu_hat, and checks the aggregates against
// the LP optimum. Throws NormalizationFailure.
OraclePolicy extract_xy_policy(const ProfitLp& plp, const LpSolution& sol, const Model& model);

struct ProfitOracle {
  ProfitLp lp;
  LpSolution solution;
  OraclePolicy policy;
};

ProfitOracle solve_profit_oracle(const Model& model, std::span<const double> pi_x,
                                 std::span<const double> pi_y);

struct HullPoint {
  double demand = 0.0;   // d = z F
  double revenue = 0.0;  // r = z (p - alpha) F
  int option = 0;
};

// Upper concave envelope of the points over the demand axis, ordered by
// increasing demand. Duplicate points keep the lowest option index.
std::vector<HullPoint> upper_concave_envelope(std::vector<HullPoint> points);

struct SupportPoint {
  int option = 0;
  double eta = 0.0;
};

// At most two price options per (product, demand state).
struct TwoPricePolicy {
  std::vector<std::vector<std::vector<SupportPoint>>> support;  // [k][y]
  std::vector<std::vector<double>> r_star;                      // [k][y]
  std::vector<std::vector<double>> r_hat;                       // [k][y]
  std::vector<std::vector<double>> d_hat;                       // [k][y]
  std::vector<std::vector<double>> d_star;                      // [k][y]
};

// Replaces each (k, y) pricing distribution by the point of the convex hull of
// {(z (p - alpha) F, z F)} with maximum revenue at the same expected demand.
TwoPricePolicy two_price_reduce(const OraclePolicy& policy, const Model& model);

// Two-point representation of the hull boundary above demand `target`.
std::vector<SupportPoint> two_point_support(int k, const DemandState& y, const PlantConfig& cfg,
                                            double target, double* r_star = nullptr);

struct LookaheadResult {
  double phi_T = 0.0;
  std::vector<std::vector<double>> expected_purchase;  // [slot][m]
  std::vector<std::vector<double>> expected_sales;     // [slot][k], E[Z F]
};

// Best expected frame profit for a policy that knows the frame's supply and
// demand states, with purchases equal to expected consumption over the frame.
LookaheadResult lookahead_value(const Model& model, std::span<const int> x_seq,
                                std::span<const int> y_seq);

struct BruteForceResult {
  double value = 0.0;
  bool pure = true;  // best policy found is deterministic
};

// Independent lower-bound oracle for the stationary optimum on tiny
// instances: every pure (X, Y)-only policy, plus every policy that mixes two
// options in a single decision group, with weights on a `grid_step` grid and
// at the breakpoints where a material balance becomes tight.
BruteForceResult brute_force_opt(const Model& model, std::span<const double> pi_x,
                                 std::span<const double> pi_y, double grid_step = 0.05);

}  // namespace plant
