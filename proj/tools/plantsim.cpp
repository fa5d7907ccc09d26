// plantsim: command-line front end for the inventory and pricing simulator.
//
// Exit codes: 0 ok, 1 bound check failed, 2 usage or parse error,
// 3 validation error, 4 runtime error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "plant/scenario.hpp"
#include "plant/simulator.hpp"

using namespace plant;

namespace {

enum Exit { kOk = 0, kBoundFailed = 1, kUsage = 2, kInvalid = 3, kRuntime = 4 };

struct Options {
  std::string scenario;
  std::optional<double> V;
  std::optional<Count> slots;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  bool placeholder = false;
  bool assembly_delay = false;
  bool demand_blind = false;
  std::optional<int> T;
  std::optional<int> J;
  double epsilon = 0.05;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--scenario", o.scenario, "scenario file (JSON)")->required();
  cmd->add_option("--V", o.V, "profit weight V > 0");
  cmd->add_option("--slots", o.slots, "horizon in slots");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--replications", o.replications, "independent replications");
  cmd->add_flag("--placeholder", o.placeholder, "start from the place-holder backlog");
  cmd->add_flag("--assembly-delay", o.assembly_delay, "one-slot assembly with product queues");
  cmd->add_flag("--demand-blind", o.demand_blind, "price from the demand factorization only");
  cmd->add_option("--T", o.T, "frame length");
  cmd->add_option("--J", o.J, "number of frames");
  cmd->add_option("--epsilon", o.epsilon, "mixing tolerance for the Markov check");
  cmd->add_option("--out", o.out, "output CSV path");
}

Scenario load(const Options& o) {
  Scenario s = parse_scenario(o.scenario);
  if (o.V) s.V = *o.V;
  if (o.slots) s.horizon = *o.slots;
  if (o.seed) s.seed = *o.seed;
  if (o.replications) s.replications = *o.replications;
  s.placeholder = s.placeholder || o.placeholder;
  s.assembly_delay = s.assembly_delay || o.assembly_delay;
  s.demand_blind = s.demand_blind || o.demand_blind;
  if (!(s.V > 0.0)) throw PlantError(Errc::ValidationError, "--V must be positive");
  if (s.horizon < 1) throw PlantError(Errc::ValidationError, "--slots must be >= 1");
  if (s.replications < 1) throw PlantError(Errc::ValidationError, "--replications must be >= 1");
  return s;
}

EpisodeConfig episode_config(const Scenario& s) {
  EpisodeConfig ec;
  ec.horizon = s.horizon;
  ec.seed = s.seed;
  ec.process_x = s.process_x;
  ec.process_y = s.process_y;
  ec.V = s.V;
  ec.placeholder = s.placeholder;
  ec.assembly_delay = s.assembly_delay;
  ec.demand_blind = s.demand_blind;
  ec.theta_override = s.theta;
  ec.allow_unsafe_theta = s.unsafe_theta;
  return ec;
}

std::string vec(const auto& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

void print_check(const BoundCheck& c) {
  std::printf("  %-28s observed %.6f  bound %.6f  se %.6f  %s\n", c.name.c_str(), c.observed,
              c.bound, c.se, c.pass ? "PASS" : "FAIL");
}

int cmd_simulate(const Options& o) {
  const Scenario s = load(o);
  const Model& model = s.model;
  EpisodeConfig ec = episode_config(s);

  ReplicationSummary sum;
  if (!o.out.empty()) {
    ec.keep_log = true;
    auto first = run_episode(model, ec);
    std::ofstream f(o.out);
    if (!f) throw PlantError(Errc::ValidationError, "cannot write '" + o.out + "'");
    write_log_csv(f, first.log, model);
    if (s.replications > 1) {
      EpisodeConfig rest = ec;
      rest.stream = 1;
      rest.keep_log = false;
      sum = run_replications(model, rest, s.replications - 1);
    }
    sum.runs.insert(sum.runs.begin(), first.metrics);
    double total = 0.0;
    Count violations = 0;
    for (const auto& r : sum.runs) {
      total += r.avg_profit;
      violations += r.bound_violations + r.drift_violations + r.profit_mismatches +
                    r.purchase_violations + r.product_queue_violations;
    }
    sum.mean_profit = total / static_cast<double>(sum.runs.size());
    sum.violations = violations;
    if (sum.runs.size() == 1) {
      sum.se = first.metrics.profit_se;
    } else {
      double var = 0.0;
      for (const auto& r : sum.runs)
        var += (r.avg_profit - sum.mean_profit) * (r.avg_profit - sum.mean_profit);
      const double n = static_cast<double>(sum.runs.size());
      sum.se = std::sqrt(var / (n - 1.0) / n);
    }
  } else {
    sum = run_replications(model, ec, s.replications);
  }

  const auto& m = sum.runs.front();
  CountVec qmin = m.q_min;
  CountVec qmax = m.q_max;
  for (const auto& r : sum.runs)
    for (int i = 0; i < model.M(); ++i) {
      qmin[i] = std::min(qmin[i], r.q_min[i]);
      qmax[i] = std::max(qmax[i], r.q_max[i]);
    }
  std::printf("slots          %lld x %zu replications\n", static_cast<long long>(m.slots),
              sum.runs.size());
  std::printf("V              %g\n", s.V);
  std::printf("avg profit     %.6f (se %.6f)\n", sum.mean_profit, sum.se);
  std::printf("theta          %s\n", vec(m.theta).c_str());
  std::printf("queue floor    %s\n", vec(model.mu_max).c_str());
  std::printf("queue ceiling  %s\n", vec(m.q_ceiling).c_str());
  std::printf("queue min/max  %s / %s\n", vec(qmin).c_str(), vec(qmax).c_str());
  std::printf("B              %.6f (max observed %.6f)\n", m.B, m.max_drift_term);
  if (s.assembly_delay) std::printf("startup cost   %.6f\n", m.startup_cost);
  std::printf("violations     %lld\n", static_cast<long long>(sum.violations));
  if (!o.out.empty()) std::printf("log            %s\n", o.out.c_str());
  return sum.violations == 0 ? kOk : kBoundFailed;
}

int cmd_oracle(const Options& o) {
  const Scenario s = load(o);
  const Model& model = s.model;
  const auto pi_x = long_run_distribution(s.process_x, static_cast<int>(model.supply.size()));
  const auto pi_y = long_run_distribution(s.process_y, static_cast<int>(model.demand.size()));
  const auto oracle = solve_profit_oracle(model, pi_x, pi_y);
  const auto& pol = oracle.policy;

  std::printf("phi_opt = %.6f\n", pol.phi_opt);
  std::printf("c_hat = %.6f  r_hat = %.6f\n", pol.c_hat, pol.r_hat);
  std::printf("a_hat = %s  mu_hat = %s\n", vec(pol.a_hat).c_str(), vec(pol.mu_hat).c_str());
  std::printf("purchase policy:\n");
  for (std::size_t x = 0; x < model.supply.size(); ++x)
    for (const auto& c : pol.purchase_dist[x])
      std::printf("  x=%s  A=%s  prob %.6f\n", model.supply[x].id.c_str(), vec(c.a).c_str(), c.prob);
  std::printf("pricing policy:\n");
  for (int k = 0; k < model.K(); ++k)
    for (std::size_t y = 0; y < model.demand.size(); ++y)
      for (int opt = 0; opt < num_price_options(model.cfg, k); ++opt) {
        const double p = pol.price_dist[k][y][opt];
        if (p <= 0.0) continue;
        const auto po = price_option(opt);
        if (po.z)
          std::printf("  k=%d y=%s  price %g  prob %.6f\n", k + 1, model.demand[y].id.c_str(),
                      model.cfg.price(k, po.price_idx), p);
        else
          std::printf("  k=%d y=%s  not offered  prob %.6f\n", k + 1, model.demand[y].id.c_str(), p);
      }

  const auto two = two_price_reduce(pol, model);
  std::printf("two-price reduction:\n");
  for (int k = 0; k < model.K(); ++k)
    for (std::size_t y = 0; y < model.demand.size(); ++y) {
      std::printf("  k=%d y=%s  d=%.6f  r_hat=%.6f  r_star=%.6f :", k + 1,
                  model.demand[y].id.c_str(), two.d_hat[k][y], two.r_hat[k][y], two.r_star[k][y]);
      for (const auto& sp : two.support[k][y]) {
        const auto po = price_option(sp.option);
        if (po.z)
          std::printf("  price %g w.p. %.6f", model.cfg.price(k, po.price_idx), sp.eta);
        else
          std::printf("  off w.p. %.6f", sp.eta);
      }
      std::printf("\n");
    }
  return kOk;
}

// States visited over `len` slots: the trace itself, or one sampled path.
std::pair<std::vector<int>, std::vector<int>> state_path(const Scenario& s, std::size_t len) {
  std::vector<int> xs;
  std::vector<int> ys;
  StateProcess px(s.process_x);
  StateProcess py(s.process_y);
  RngStream rng(s.seed, 0);
  for (std::size_t t = 0; t < len; ++t) {
    xs.push_back(px.next_state(static_cast<Count>(t), rng));
    ys.push_back(py.next_state(static_cast<Count>(t), rng));
  }
  return {xs, ys};
}

std::pair<int, int> frames(const Options& o, const Scenario& s) {
  const int T = o.T.value_or(1);
  if (T < 1) throw PlantError(Errc::ValidationError, "--T must be >= 1");
  Count len = s.horizon;
  if (!o.slots && s.process_x.mode == ProcessMode::Trace)
    len = static_cast<Count>(std::min(s.process_x.trace.size(), s.process_y.trace.size()));
  const int J = o.J.value_or(static_cast<int>(len / T));
  if (J < 1) throw PlantError(Errc::ValidationError, "--J must be >= 1");
  return {T, J};
}

int cmd_lookahead(const Options& o) {
  const Scenario s = load(o);
  const auto [T, J] = frames(o, s);
  const auto [xs, ys] = state_path(s, static_cast<std::size_t>(T) * J);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw PlantError(Errc::ValidationError, "cannot write '" + o.out + "'");
    file << "frame,start,phi_T\n" << std::setprecision(9);
  }
  double sum = 0.0;
  for (int j = 0; j < J; ++j) {
    const auto r = lookahead_value(s.model, std::span(xs).subspan(j * T, T),
                                   std::span(ys).subspan(j * T, T));
    sum += r.phi_T;
    std::printf("frame %d  t=%d  phi_T = %.6f\n", j, j * T, r.phi_T);
    if (file) file << j << ',' << j * T << ',' << r.phi_T << '\n';
  }
  std::printf("average phi_T / T = %.6f over %d frames of %d slots\n",
              sum / (static_cast<double>(T) * J), J, T);
  return kOk;
}

int cmd_compare(const Options& o) {
  const Scenario s = load(o);
  const Model& model = s.model;
  EpisodeConfig ec = episode_config(s);
  const bool trace = s.process_x.mode == ProcessMode::Trace || s.process_y.mode == ProcessMode::Trace;
  const bool iid = s.process_x.mode == ProcessMode::Iid && s.process_y.mode == ProcessMode::Iid;

  bool pass = false;
  if (trace) {
    const auto [T, J] = frames(o, s);
    const auto [xs, ys] = state_path(s, static_cast<std::size_t>(T) * J);
    const auto rep = check_lookahead_bound(model, xs, ys, ec, T, J, s.replications);
    std::printf("lookahead check  T=%d J=%d V=%g\n", T, J, s.V);
    std::printf("  lookahead avg %.6f  B %.6f  L(Q0) %.6f\n", rep.lookahead_avg, rep.B,
                rep.initial_lyapunov);
    print_check(rep.check);
    std::printf("  violations %lld\n", static_cast<long long>(rep.summary.violations));
    pass = rep.pass;
  } else if (iid && !o.T) {
    const auto rep = check_iid_bound(model, ec, s.replications);
    std::printf("i.i.d. check  V=%g  phi_opt %.6f  B %.6f  B/V %.6f\n", s.V, rep.phi_opt, rep.B,
                rep.B / s.V);
    std::printf("  gap %.6f  (allowed %.6f + 3 se)\n", rep.phi_opt - rep.summary.mean_profit,
                rep.B / s.V);
    std::printf("  queue ceiling %s  observed %s .. %s\n", vec(rep.q_ceiling).c_str(),
                vec(rep.q_min_observed).c_str(), vec(rep.q_max_observed).c_str());
    for (const auto& c : rep.checks) print_check(c);
    pass = rep.pass;
  } else {
    const int T = o.T.value_or(1);
    const auto rep = check_ergodic_bound(model, ec, o.epsilon, T, s.replications);
    std::printf("ergodic check  V=%g  epsilon=%g  T=%d  (assumes the pair is valid)\n", s.V,
                o.epsilon, T);
    std::printf("  phi_opt(pi) %.6f  rhs %.6f\n", rep.phi_opt, rep.rhs);
    print_check(rep.check);
    std::printf("  violations %lld\n", static_cast<long long>(rep.summary.violations));
    pass = rep.pass;
  }
  return pass ? kOk : kBoundFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inventory and pricing control simulator"};
  app.require_subcommand(1);
  Options o;
  auto* sim = app.add_subcommand("simulate", "run controller episodes");
  auto* ora = app.add_subcommand("oracle", "solve the stationary profit LP");
  auto* look = app.add_subcommand("lookahead", "per-frame lookahead values");
  auto* cmp = app.add_subcommand("compare", "check the profit bound for the scenario");
  for (auto* c : {sim, ora, look, cmp}) add_common(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (ora->parsed()) return cmd_oracle(o);
    if (look->parsed()) return cmd_lookahead(o);
    return cmd_compare(o);
  } catch (const PlantError& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::ParseError:
        return kUsage;
      case Errc::ValidationError:
      case Errc::EmptyPriceSet:
      case Errc::DemandExceedsCap:
      case Errc::OrphanProduct:
      case Errc::NegativeEntry:
      case Errc::DimensionMismatch:
      case Errc::BadProcessSpec:
      case Errc::InitOutOfRange:
      case Errc::ThetaBelowSafe:
        return kInvalid;
      default:
        return kRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
