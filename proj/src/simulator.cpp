#include "plant/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>

namespace plant {

namespace {

ControllerParams params_for(const Model& model, const EpisodeConfig& ec) {
  auto params = make_controller_params(model, ec.V, ec.demand_blind, ec.placeholder,
                                       ec.theta_override, ec.allow_unsafe_theta);
  if (!ec.check_bounds) params.check_bounds = false;
  return params;
}

ControllerState initial_state(const Model& model, const ControllerParams& params,
                              const EpisodeConfig& ec) {
  if (ec.controller == ControllerKind::OraclePlayback) {
    CountVec Q = ec.initial_queue.value_or(model.mu_max);
    return ControllerState{std::move(Q), CountVec(model.M(), 0), 0};
  }
  if (ec.placeholder)
    return init_placeholder(model, params, ec.initial_queue.value_or(CountVec(model.M(), 0)));
  return init_state(model, params, ec.initial_queue.value_or(model.mu_max));
}

template <class Dist>
int sample_index(const Dist& probs, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p <= 0.0) continue;
    acc += p;
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

// One oracle-policy slot: randomized (X, Y)-only decision, greedy fulfillment
// from whatever stock is on hand, unbounded buffer.
StepRecord playback_step(ControllerState& state, int xi, int yi, const OraclePolicy& policy,
                         RngStream& policy_rng, RngStream& demand_rng, const Model& model) {
  const auto& cfg = model.cfg;
  const auto& x = model.supply[xi];
  const auto& y = model.demand[yi];
  SlotDecision dec = idle_decision(cfg);

  const auto& pdist = policy.purchase_dist[xi];
  std::vector<double> probs;
  for (const auto& c : pdist) probs.push_back(c.prob);
  if (!pdist.empty()) dec.A = pdist[sample_index(probs, policy_rng)].a;
  for (int k = 0; k < model.K(); ++k) {
    const auto opt = price_option(sample_index(policy.price_dist[k][yi], policy_rng));
    dec.Z[k] = opt.z;
    dec.price_idx[k] = opt.price_idx;
  }

  CountVec D(model.K(), 0);
  for (int k = 0; k < model.K(); ++k)
    if (dec.Z[k]) D[k] = realize_demand(k, dec.price_idx[k], y, cfg, demand_rng);
  CountVec sold = schedule_fulfillment(state.Q, dec, D, cfg);

  StepRecord rec;
  rec.outcome.phi = nominal_profit(dec, D, x, cfg);
  rec.outcome.phi_actual = actual_profit(dec, sold, x, cfg);
  rec.outcome.mu = material_consumption(cfg, sold);
  state.Q = queue_update(state.Q, sold, dec.A, cfg);
  ++state.slot;
  rec.outcome.D = std::move(D);
  rec.outcome.D_tilde = std::move(sold);
  rec.decision = std::move(dec);
  return rec;
}

double batch_se(const std::vector<double>& per_slot) {
  const std::size_t n = per_slot.size();
  if (n < 2) return 0.0;
  const std::size_t batches = std::min<std::size_t>(50, n);
  std::vector<double> sum(batches, 0.0);
  std::vector<double> cnt(batches, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t b = t * batches / n;
    sum[b] += per_slot[t];
    cnt[b] += 1.0;
  }
  double mean = 0.0;
  for (std::size_t b = 0; b < batches; ++b) mean += sum[b] / cnt[b];
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const double d = sum[b] / cnt[b] - mean;
    var += d * d;
  }
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

void track_range(Metrics& mt, const CountVec& Q) {
  for (std::size_t m = 0; m < Q.size(); ++m) {
    mt.q_min[m] = std::min(mt.q_min[m], Q[m]);
    mt.q_max[m] = std::max(mt.q_max[m], Q[m]);
  }
}

}  // namespace

double assembly_startup_cost(const Model& model, const SupplyState& x0) {
  const auto& cfg = model.cfg;
  double cost = 0.0;
  for (int k = 0; k < model.K(); ++k) {
    double unit = cfg.alpha[k];
    for (int m = 0; m < model.M(); ++m)
      unit += static_cast<double>(cfg.beta[m][k] * x0.unit_cost[m]);
    cost += static_cast<double>(cfg.d_max[k]) * unit;
  }
  return cost;
}

EpisodeResult run_episode(const Model& model, const EpisodeConfig& ec) {
  if (ec.horizon < 1) throw PlantError(Errc::ValidationError, "horizon must be >= 1");
  validate_process(ec.process_x, static_cast<int>(model.supply.size()));
  validate_process(ec.process_y, static_cast<int>(model.demand.size()));
  if (ec.controller == ControllerKind::OraclePlayback && !ec.policy)
    throw PlantError(Errc::ValidationError, "oracle playback needs a policy");

  const auto& cfg = model.cfg;
  const int M = model.M();
  const int K = model.K();
  const ControllerParams params = params_for(model, ec);
  ControllerState state = initial_state(model, params, ec);
  const bool jpp = ec.controller == ControllerKind::Jpp;

  RngStream state_rng(ec.seed, 3 * ec.stream);
  RngStream demand_rng(ec.seed, 3 * ec.stream + 1);
  RngStream policy_rng(ec.seed, 3 * ec.stream + 2);
  StateProcess px(ec.process_x);
  StateProcess py(ec.process_y);

  EpisodeResult result;
  Metrics& mt = result.metrics;
  mt.theta = params.theta;
  mt.q_ceiling = queue_ceiling(model, params);
  mt.B = drift_constant(cfg, model.mu_max);
  mt.q_min = state.Q;
  mt.q_max = state.Q;

  CountVec product_queue;
  if (ec.assembly_delay) product_queue = cfg.d_max;

  std::vector<double> per_slot;
  per_slot.reserve(static_cast<std::size_t>(ec.horizon));
  double cumulative = 0.0;
  for (Count t = 0; t < ec.horizon; ++t) {
    const int xi = px.next_state(t, state_rng);
    const int yi = py.next_state(t, state_rng);
    const auto& x = model.supply[xi];
    const auto& y = model.demand[yi];
    if (t == 0 && ec.assembly_delay) {
      mt.startup_cost = assembly_startup_cost(model, x);
      cumulative -= mt.startup_cost;
    }

    const CountVec q_start = state.Q;
    const CountVec inventory = state.actual();
    if (jpp && !within_bounds(q_start, model, params)) ++mt.bound_violations;
    if (ec.assembly_delay) {
      for (int k = 0; k < K; ++k)
        if (product_queue[k] != cfg.d_max[k]) ++mt.product_queue_violations;
    }

    StepRecord rec = jpp ? controller_step(state, x, y, demand_rng, params, model)
                         : playback_step(state, xi, yi, *ec.policy, policy_rng, demand_rng, model);

    if (ec.assembly_delay) {
      // consumers draw finished units now; assembly refills them at slot end
      for (int k = 0; k < K; ++k) {
        product_queue[k] -= rec.outcome.D_tilde[k];
        if (product_queue[k] < 0) ++mt.product_queue_violations;
      }
      for (int k = 0; k < K; ++k) product_queue[k] += rec.outcome.D_tilde[k];
    }

    if (jpp) {
      if (rec.drift_term > mt.B + 1e-9) ++mt.drift_violations;
      mt.max_drift_term = std::max(mt.max_drift_term, rec.drift_term);
      if (rec.outcome.phi != rec.outcome.phi_actual) ++mt.profit_mismatches;
      for (int m = 0; m < M; ++m)
        if (static_cast<double>(q_start[m]) > params.theta[m] && rec.decision.A[m] > 0)
          ++mt.purchase_violations;
    }

    mt.total_nominal += rec.outcome.phi;
    cumulative += rec.outcome.phi_actual;
    per_slot.push_back(rec.outcome.phi_actual);
    track_range(mt, state.Q);

    if (ec.keep_log) {
      SlotLogRow row;
      row.t = t;
      row.x_id = x.id;
      row.y_id = y.id;
      row.Q = inventory;
      row.A = rec.decision.A;
      row.Z = rec.decision.Z;
      row.P.assign(K, 0.0);
      for (int k = 0; k < K; ++k)
        if (rec.decision.Z[k]) row.P[k] = cfg.price(k, rec.decision.price_idx[k]);
      row.D = rec.outcome.D;
      row.phi = rec.outcome.phi;
      row.phi_actual = rec.outcome.phi_actual;
      row.cumulative = cumulative;
      row.avg_phi = cumulative / static_cast<double>(t + 1);
      result.log.push_back(std::move(row));
    }
  }
  if (jpp && !within_bounds(state.Q, model, params)) ++mt.bound_violations;

  mt.slots = ec.horizon;
  mt.total_profit = cumulative;
  mt.avg_profit = cumulative / static_cast<double>(ec.horizon);
  mt.profit_se = batch_se(per_slot);
  mt.final_queue = state.actual();
  return result;
}

EpisodeResult run_assembly_delay(const Model& model, EpisodeConfig ec) {
  ec.assembly_delay = true;
  return run_episode(model, ec);
}

ReplicationSummary run_replications(const Model& model, const EpisodeConfig& ec,
                                    int replications) {
  if (replications < 1) throw PlantError(Errc::ValidationError, "replications must be >= 1");
  std::vector<std::future<Metrics>> jobs;
  for (int r = 0; r < replications; ++r) {
    EpisodeConfig one = ec;
    one.stream = ec.stream + static_cast<std::uint64_t>(r);
    one.keep_log = false;
    jobs.push_back(std::async(std::launch::async,
                              [&model, one] { return run_episode(model, one).metrics; }));
  }
  ReplicationSummary s;
  for (auto& j : jobs) s.runs.push_back(j.get());

  double sum = 0.0;
  for (const auto& r : s.runs) {
    sum += r.avg_profit;
    s.violations += r.bound_violations + r.drift_violations + r.profit_mismatches +
                    r.purchase_violations + r.product_queue_violations;
  }
  const double n = static_cast<double>(s.runs.size());
  s.mean_profit = sum / n;
  if (s.runs.size() == 1) {
    s.se = s.runs.front().profit_se;
  } else {
    double var = 0.0;
    for (const auto& r : s.runs) var += (r.avg_profit - s.mean_profit) * (r.avg_profit - s.mean_profit);
    s.se = std::sqrt(var / (n - 1.0) / n);
  }
  return s;
}

void write_log_csv(std::ostream& os, const std::vector<SlotLogRow>& log, const Model& model) {
  const int M = model.M();
  const int K = model.K();
  os << "t,x_id,y_id";
  for (int m = 1; m <= M; ++m) os << ",Q_" << m;
  for (int m = 1; m <= M; ++m) os << ",A_" << m;
  for (int k = 1; k <= K; ++k) os << ",Z_" << k;
  for (int k = 1; k <= K; ++k) os << ",P_" << k;
  for (int k = 1; k <= K; ++k) os << ",D_" << k;
  os << ",phi,phi_actual,avg_phi\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(9);
  for (const auto& r : log) {
    os << r.t << ',' << r.x_id << ',' << r.y_id;
    for (auto q : r.Q) os << ',' << q;
    for (auto a : r.A) os << ',' << a;
    for (auto z : r.Z) os << ',' << z;
    for (auto p : r.P) os << ',' << p;
    for (auto d : r.D) os << ',' << d;
    os << ',' << r.phi << ',' << r.phi_actual << ',' << r.avg_phi << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

BoundCheck make_check(std::string name, double observed, double bound, double se, bool lower) {
  BoundCheck c{std::move(name), observed, bound, se, lower, false};
  c.pass = lower ? observed >= bound - 3.0 * se : observed <= bound + 3.0 * se;
  return c;
}

IidBoundReport check_iid_bound(const Model& model, const EpisodeConfig& ec, int replications) {
  const int nx = static_cast<int>(model.supply.size());
  const int ny = static_cast<int>(model.demand.size());
  if (ec.process_x.mode != ProcessMode::Iid || ec.process_y.mode != ProcessMode::Iid)
    throw PlantError(Errc::ValidationError, "the i.i.d. profit check needs i.i.d. processes");
  validate_process(ec.process_x, nx);
  validate_process(ec.process_y, ny);

  IidBoundReport rep;
  rep.V = ec.V;
  rep.B = drift_constant(model.cfg, model.mu_max);
  rep.phi_opt = solve_profit_oracle(model, ec.process_x.probs, ec.process_y.probs).policy.phi_opt;

  EpisodeConfig run = ec;
  run.controller = ControllerKind::Jpp;
  rep.summary = run_replications(model, run, replications);

  const auto& first = rep.summary.runs.front();
  rep.q_ceiling = first.q_ceiling;
  rep.q_max_observed = first.q_max;
  rep.q_min_observed = first.q_min;
  for (const auto& r : rep.summary.runs) {
    for (int m = 0; m < model.M(); ++m) {
      rep.q_max_observed[m] = std::max(rep.q_max_observed[m], r.q_max[m]);
      rep.q_min_observed[m] = std::min(rep.q_min_observed[m], r.q_min[m]);
    }
  }
  rep.checks.push_back(make_check("profit >= phi_opt - B/V", rep.summary.mean_profit,
                                  rep.phi_opt - rep.B / ec.V, rep.summary.se, true));
  rep.checks.push_back(make_check("profit <= phi_opt", rep.summary.mean_profit, rep.phi_opt,
                                  rep.summary.se, false));
  rep.checks.push_back(make_check("bound violations == 0",
                                  static_cast<double>(rep.summary.violations), 0.0, 0.0, false));
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const BoundCheck& c) { return c.pass; });
  return rep;
}

ErgodicBoundReport check_ergodic_bound(const Model& model, const EpisodeConfig& ec, double epsilon,
                              int T, int replications) {
  const int nx = static_cast<int>(model.supply.size());
  const int ny = static_cast<int>(model.demand.size());
  validate_process(ec.process_x, nx);
  validate_process(ec.process_y, ny);
  if (ec.process_x.mode == ProcessMode::Trace || ec.process_y.mode == ProcessMode::Trace)
    throw PlantError(Errc::ValidationError, "the ergodic profit check needs i.i.d. or Markov processes");
  if (T < 1 || epsilon < 0.0)
    throw PlantError(Errc::ValidationError, "need T >= 1 and epsilon >= 0");

  ErgodicBoundReport rep;
  rep.pi_x = long_run_distribution(ec.process_x, nx);
  rep.pi_y = long_run_distribution(ec.process_y, ny);
  rep.phi_opt = solve_profit_oracle(model, rep.pi_x, rep.pi_y).policy.phi_opt;

  const auto params = params_for(model, ec);
  const double B = drift_constant(model.cfg, model.mu_max);
  double spread = 0.0;
  for (int m = 0; m < model.M(); ++m)
    spread += std::max(params.theta[m], static_cast<double>(model.cfg.a_max[m])) / ec.V;
  rep.rhs = rep.phi_opt - static_cast<double>(T) * B / ec.V - epsilon * (1.0 + spread);

  EpisodeConfig run = ec;
  run.controller = ControllerKind::Jpp;
  rep.summary = run_replications(model, run, replications);
  rep.check = make_check("profit >= ergodic bound", rep.summary.mean_profit, rep.rhs,
                         rep.summary.se, true);
  rep.pass = rep.check.pass && rep.summary.violations == 0;
  return rep;
}

LookaheadBoundReport check_lookahead_bound(const Model& model, const std::vector<int>& x_trace,
                              const std::vector<int>& y_trace, const EpisodeConfig& ec, int T,
                              int J, int replications) {
  if (T < 1 || J < 1) throw PlantError(Errc::ValidationError, "need T >= 1 and J >= 1");
  const std::size_t len = static_cast<std::size_t>(T) * static_cast<std::size_t>(J);
  if (x_trace.size() < len || y_trace.size() < len)
    throw PlantError(Errc::TraceExhausted, "trace shorter than J * T slots");

  LookaheadBoundReport rep;
  for (int j = 0; j < J; ++j) {
    const std::span<const int> xs(x_trace.data() + j * T, T);
    const std::span<const int> ys(y_trace.data() + j * T, T);
    rep.frame_values.push_back(lookahead_value(model, xs, ys).phi_T);
  }
  double sum = 0.0;
  for (double v : rep.frame_values) sum += v;
  rep.lookahead_avg = sum / static_cast<double>(len);

  EpisodeConfig run = ec;
  run.controller = ControllerKind::Jpp;
  run.horizon = static_cast<Count>(len);
  run.process_x = StateProcessSpec::from_trace({x_trace.begin(), x_trace.begin() + len});
  run.process_y = StateProcessSpec::from_trace({y_trace.begin(), y_trace.begin() + len});

  const auto params = params_for(model, run);
  const auto start = initial_state(model, params, run);
  rep.B = drift_constant(model.cfg, model.mu_max);
  rep.initial_lyapunov = lyapunov(start.Q, params.theta);
  rep.bound = rep.lookahead_avg - rep.B * T / ec.V -
              rep.initial_lyapunov / (ec.V * static_cast<double>(len));

  rep.summary = run_replications(model, run, replications);
  double nominal = 0.0;
  for (const auto& r : rep.summary.runs) nominal += r.total_nominal / static_cast<double>(r.slots);
  nominal /= static_cast<double>(rep.summary.runs.size());
  rep.check = make_check("profit >= lookahead bound", nominal, rep.bound, rep.summary.se, true);
  rep.pass = rep.check.pass && rep.summary.violations == 0;
  return rep;
}

}  // namespace plant
