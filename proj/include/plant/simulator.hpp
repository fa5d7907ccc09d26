#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "plant/controller.hpp"
#include "plant/model.hpp"
#include "plant/oracles.hpp"
#include "plant/processes.hpp"

namespace plant {

enum class ControllerKind { Jpp, OraclePlayback };

struct EpisodeConfig {
  Count horizon = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // replication index
  ControllerKind controller = ControllerKind::Jpp;
  StateProcessSpec process_x;
  StateProcessSpec process_y;

  double V = 1.0;
  bool placeholder = false;
  bool assembly_delay = false;
  bool demand_blind = false;
  std::optional<std::vector<double>> theta_override;
  bool allow_unsafe_theta = false;
  // Q(0), or the actual starting stock in placeholder mode. Defaults to
  // mu_max (direct) or zero (placeholder).
  std::optional<CountVec> initial_queue;

  bool check_bounds = true;
  bool keep_log = false;
  std::shared_ptr<const OraclePolicy> policy;  // OraclePlayback only
};

struct Metrics {
  Count slots = 0;
  double total_profit = 0.0;   // sum of phi_actual, less any startup cost
  double total_nominal = 0.0;  // sum of phi
  double avg_profit = 0.0;
  double profit_se = 0.0;      // batch-means standard error of avg_profit

  CountVec q_min;  // over every slot start and the final state
  CountVec q_max;
  CountVec final_queue;
  std::vector<double> theta;
  std::vector<double> q_ceiling;  // theta + A_max

  double B = 0.0;  // drift constant
  double max_drift_term = 0.0;

  Count bound_violations = 0;      // mu_max <= Q <= theta + A_max
  Count drift_violations = 0;      // B(t) > B
  Count profit_mismatches = 0;     // phi != phi_actual
  Count purchase_violations = 0;   // A_m > 0 while Q_m > theta_m
  Count product_queue_violations = 0;
  double startup_cost = 0.0;
};

struct SlotLogRow {
  Count t = 0;
  std::string x_id;
  std::string y_id;
  CountVec Q;  // inventory at slot start (actual units in placeholder mode)
  CountVec A;
  std::vector<int> Z;
  std::vector<double> P;  // 0 where not offered
  CountVec D;
  double phi = 0.0;
  double phi_actual = 0.0;
  double avg_phi = 0.0;
  double cumulative = 0.0;  // running total profit, net of startup cost
};

struct EpisodeResult {
  Metrics metrics;
  std::vector<SlotLogRow> log;
};

EpisodeResult run_episode(const Model& model, const EpisodeConfig& ec);

// Same controller with one-slot assembly: K finished-goods queues are stocked
// with D_max units before slot 0 and refilled at the end of every slot.
EpisodeResult run_assembly_delay(const Model& model, EpisodeConfig ec);

// Cost of stocking D_max[k] finished units of every product at the slot-0
// supply prices.
double assembly_startup_cost(const Model& model, const SupplyState& x0);

struct ReplicationSummary {
  std::vector<Metrics> runs;
  double mean_profit = 0.0;
  double se = 0.0;  // across replications
  Count violations = 0;
};

// Replications use streams ec.stream, ec.stream + 1, ... and run concurrently.
ReplicationSummary run_replications(const Model& model, const EpisodeConfig& ec,
                                    int replications);

void write_log_csv(std::ostream& os, const std::vector<SlotLogRow>& log, const Model& model);

struct BoundCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool lower = true;  // observed >= bound - 3 se, else observed <= bound + 3 se
  bool pass = false;
};

BoundCheck make_check(std::string name, double observed, double bound, double se, bool lower);

struct IidBoundReport {
  double phi_opt = 0.0;
  double B = 0.0;
  double V = 0.0;
  ReplicationSummary summary;
  std::vector<double> q_ceiling;
  CountVec q_max_observed;
  CountVec q_min_observed;
  std::vector<BoundCheck> checks;
  bool pass = false;
};

// i.i.d. processes: profit within B/V of the stationary optimum, never above
// it, and zero queue-bound violations.
IidBoundReport check_iid_bound(const Model& model, const EpisodeConfig& ec, int replications);

struct ErgodicBoundReport {
  double phi_opt = 0.0;
  double rhs = 0.0;
  std::vector<double> pi_x;
  std::vector<double> pi_y;
  ReplicationSummary summary;
  BoundCheck check;
  bool pass = false;
};

// Markov-modulated processes with a caller-supplied (epsilon, T):
// avg profit >= phi_opt - T B / V - epsilon (1 + sum_m max(theta_m, A_max,m) / V).
ErgodicBoundReport check_ergodic_bound(const Model& model, const EpisodeConfig& ec, double epsilon,
                              int T, int replications = 1);

struct LookaheadBoundReport {
  std::vector<double> frame_values;  // phi_T per frame
  double lookahead_avg = 0.0;        // (1 / JT) sum_j phi_T(jT)
  double B = 0.0;
  double initial_lyapunov = 0.0;
  double bound = 0.0;
  ReplicationSummary summary;
  BoundCheck check;
  bool pass = false;
};

// Arbitrary trace of length >= J T:
// avg profit >= (1 / JT) sum_j phi_T(jT) - B T / V - L(Q(0)) / (V J T).
LookaheadBoundReport check_lookahead_bound(const Model& model, const std::vector<int>& x_trace,
                              const std::vector<int>& y_trace, const EpisodeConfig& ec, int T,
                              int J, int replications);

}  // namespace plant
