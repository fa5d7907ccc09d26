#include "plant/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace plant {

std::vector<CountVec> enumerate_actions(const PlantConfig& cfg, const SupplyState& x,
                                        std::size_t limit) {
  const int M = cfg.num_materials;
  CountVec cap(M);
  for (int m = 0; m < M; ++m) cap[m] = std::min(cfg.a_max[m], x.available[m]);

  std::vector<CountVec> out;
  CountVec a(M, 0);
  for (;;) {
    if (purchase_cost(a, x) <= cfg.c_max) {
      if (out.size() >= limit)
        throw PlantError(Errc::ActionSpaceTooLarge,
                         "supply state '" + x.id + "' has more than " + std::to_string(limit) +
                             " purchase vectors");
      out.push_back(a);
    }
    // odometer, last material fastest
    int m = M - 1;
    while (m >= 0 && a[m] == cap[m]) a[m--] = 0;
    if (m < 0) break;
    ++a[m];
  }
  return out;
}

ProfitLp build_profit_lp(const Model& model, std::span<const double> pi_x,
                         std::span<const double> pi_y) {
  const auto& cfg = model.cfg;
  const int M = model.M();
  const int K = model.K();
  const int nx = static_cast<int>(model.supply.size());
  const int ny = static_cast<int>(model.demand.size());
  if (static_cast<int>(pi_x.size()) != nx || static_cast<int>(pi_y.size()) != ny)
    throw PlantError(Errc::DimensionMismatch, "state distribution has wrong length");

  ProfitLp out;
  out.pi_x.assign(pi_x.begin(), pi_x.end());
  out.pi_y.assign(pi_y.begin(), pi_y.end());
  auto& lp = out.lp;

  out.actions.resize(nx);
  out.action_var.resize(nx);
  for (int x = 0; x < nx; ++x) {
    out.actions[x] = enumerate_actions(cfg, model.supply[x]);
    for (const auto& a : out.actions[x]) {
      const double cost = static_cast<double>(purchase_cost(a, model.supply[x]));
      out.action_var[x].push_back(lp.add_var(-pi_x[x] * cost, 1.0));
    }
  }
  out.option_var.assign(K, std::vector<std::vector<int>>(ny));
  for (int k = 0; k < K; ++k) {
    for (int y = 0; y < ny; ++y) {
      for (int o = 0; o < num_price_options(cfg, k); ++o) {
        const auto opt = price_option(o);
        double obj = 0.0;
        if (opt.z)
          obj = pi_y[y] * (cfg.price(k, opt.price_idx) - cfg.alpha[k]) *
                model.demand[y].F[k][opt.price_idx];
        out.option_var[k][y].push_back(lp.add_var(obj, 1.0));
      }
    }
  }

  const int n = lp.num_vars();
  for (int x = 0; x < nx; ++x) {
    std::vector<double> row(n, 0.0);
    for (int v : out.action_var[x]) row[v] = 1.0;
    lp.add_row(std::move(row), RowSense::Equal, 1.0);
  }
  for (int k = 0; k < K; ++k) {
    for (int y = 0; y < ny; ++y) {
      std::vector<double> row(n, 0.0);
      for (int v : out.option_var[k][y]) row[v] = 1.0;
      lp.add_row(std::move(row), RowSense::Equal, 1.0);
    }
  }
  // a_hat_m - mu_hat_m >= 0
  for (int m = 0; m < M; ++m) {
    std::vector<double> row(n, 0.0);
    for (int x = 0; x < nx; ++x)
      for (std::size_t i = 0; i < out.actions[x].size(); ++i)
        row[out.action_var[x][i]] += pi_x[x] * static_cast<double>(out.actions[x][i][m]);
    for (int k = 0; k < K; ++k) {
      if (!cfg.uses(m, k)) continue;
      for (int y = 0; y < ny; ++y) {
        for (int o = 1; o < num_price_options(cfg, k); ++o) {
          const auto opt = price_option(o);
          row[out.option_var[k][y][o]] -= pi_y[y] * static_cast<double>(cfg.beta[m][k]) *
                                          model.demand[y].F[k][opt.price_idx];
        }
      }
    }
    lp.add_row(std::move(row), RowSense::GreaterEq, 0.0);
  }
  return out;
}

PricingAggregate pricing_aggregate(const std::vector<double>& option_probs, int k,
                                   const DemandState& y, const PlantConfig& cfg) {
  PricingAggregate agg;
  for (int o = 1; o < static_cast<int>(option_probs.size()); ++o) {
    const auto opt = price_option(o);
    const double f = y.F[k][opt.price_idx];
    agg.demand += option_probs[o] * f;
    agg.revenue += option_probs[o] * (cfg.price(k, opt.price_idx) - cfg.alpha[k]) * f;
  }
  return agg;
}

void compute_aggregates(OraclePolicy& policy, const Model& model) {
  const auto& cfg = model.cfg;
  const int M = model.M();
  policy.c_hat = 0.0;
  policy.r_hat = 0.0;
  policy.a_hat.assign(M, 0.0);
  policy.mu_hat.assign(M, 0.0);
  for (std::size_t x = 0; x < policy.purchase_dist.size(); ++x) {
    for (const auto& choice : policy.purchase_dist[x]) {
      const double w = policy.pi_x[x] * choice.prob;
      policy.c_hat += w * static_cast<double>(purchase_cost(choice.a, model.supply[x]));
      for (int m = 0; m < M; ++m) policy.a_hat[m] += w * static_cast<double>(choice.a[m]);
    }
  }
  for (int k = 0; k < model.K(); ++k) {
    for (std::size_t y = 0; y < policy.pi_y.size(); ++y) {
      const auto agg = pricing_aggregate(policy.price_dist[k][y], k, model.demand[y], cfg);
      policy.r_hat += policy.pi_y[y] * agg.revenue;
      for (int m = 0; m < M; ++m)
        policy.mu_hat[m] += policy.pi_y[y] * static_cast<double>(cfg.beta[m][k]) * agg.demand;
    }
  }
  policy.phi_opt = policy.r_hat - policy.c_hat;
}

namespace {

std::vector<double> normalized(std::vector<double> probs, const std::string& what) {
  double sum = 0.0;
  for (double& p : probs) {
    p = std::max(p, 0.0);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw PlantError(Errc::NormalizationFailure, what + " sums to " + std::to_string(sum));
  for (double& p : probs) p /= sum;
  return probs;
}

// Moves purchase mass from a to a - e_m until a_hat_m no longer exceeds
// mu_hat_m. Every such shifted vector is still a feasible purchase.
void trim_surplus(OraclePolicy& policy, const Model& model) {
  constexpr double kTol = 1e-13;
  for (int m = 0; m < model.M(); ++m) {
    for (int guard = 0; guard < 1'000'000; ++guard) {
      compute_aggregates(policy, model);
      double excess = policy.a_hat[m] - policy.mu_hat[m];
      if (excess <= kTol) break;
      bool moved = false;
      for (std::size_t x = 0; x < policy.purchase_dist.size() && excess > kTol; ++x) {
        const double px = policy.pi_x[x];
        if (px <= 0.0) continue;
        auto& dist = policy.purchase_dist[x];
        // largest a_m first so each pass removes the most units
        for (std::size_t i = dist.size(); i-- > 0 && excess > kTol;) {
          if (dist[i].a[m] == 0 || dist[i].prob <= 0.0) continue;
          const double delta = std::min(dist[i].prob, excess / px);
          CountVec lower = dist[i].a;
          --lower[m];
          dist[i].prob -= delta;
          auto it = std::find_if(dist.begin(), dist.end(),
                                 [&](const PurchaseChoice& c) { return c.a == lower; });
          if (it != dist.end())
            it->prob += delta;
          else
            dist.push_back(PurchaseChoice{lower, delta});
          excess -= px * delta;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  for (auto& dist : policy.purchase_dist) {
    std::erase_if(dist, [](const PurchaseChoice& c) { return c.prob <= 0.0; });
    std::sort(dist.begin(), dist.end(),
              [](const PurchaseChoice& a, const PurchaseChoice& b) { return a.a < b.a; });
  }
  compute_aggregates(policy, model);
}

}  // namespace

OraclePolicy extract_xy_policy(const ProfitLp& plp, const LpSolution& sol, const Model& model) {
  OraclePolicy policy;
  policy.pi_x = plp.pi_x;
  policy.pi_y = plp.pi_y;
  const int nx = static_cast<int>(plp.actions.size());
  policy.purchase_dist.resize(nx);
  for (int x = 0; x < nx; ++x) {
    std::vector<double> mass;
    for (int v : plp.action_var[x]) mass.push_back(sol.x[v]);
    mass = normalized(std::move(mass), "purchase distribution of '" + model.supply[x].id + "'");
    for (std::size_t i = 0; i < mass.size(); ++i)
      if (mass[i] > 1e-12) policy.purchase_dist[x].push_back({plp.actions[x][i], mass[i]});
  }
  policy.price_dist.assign(model.K(), {});
  for (int k = 0; k < model.K(); ++k) {
    for (std::size_t y = 0; y < plp.pi_y.size(); ++y) {
      std::vector<double> mass;
      for (int v : plp.option_var[k][y]) mass.push_back(sol.x[v]);
      mass = normalized(std::move(mass), "price distribution of product " + std::to_string(k) +
                                             " in '" + model.demand[y].id + "'");
      for (double& p : mass)
        if (p <= 1e-12) p = 0.0;
      double sum = 0.0;
      for (double p : mass) sum += p;
      for (double& p : mass) p /= sum;
      policy.price_dist[k].push_back(std::move(mass));
    }
  }
  // Tiny masses dropped above were normalized away; put the policy back on the
  // exact purchase/consumption balance.
  trim_surplus(policy, model);

  const double tol = 1e-9 * std::max(1.0, std::abs(sol.value));
  for (int m = 0; m < model.M(); ++m) {
    if (policy.a_hat[m] < policy.mu_hat[m] - 1e-9 || policy.a_hat[m] > policy.mu_hat[m] + 1e-9) {
      std::ostringstream os;
      os << "material " << m << ": a_hat = " << policy.a_hat[m]
         << " differs from mu_hat = " << policy.mu_hat[m];
      throw PlantError(Errc::NormalizationFailure, os.str());
    }
  }
  if (std::abs(policy.phi_opt - sol.value) > tol) {
    std::ostringstream os;
    os << "policy value " << policy.phi_opt << " differs from LP optimum " << sol.value;
    throw PlantError(Errc::NormalizationFailure, os.str());
  }
  policy.phi_opt = sol.value;
  return policy;
}

ProfitOracle solve_profit_oracle(const Model& model, std::span<const double> pi_x,
                                 std::span<const double> pi_y) {
  ProfitOracle out;
  out.lp = build_profit_lp(model, pi_x, pi_y);
  out.solution = solve_lp(out.lp.lp);
  out.policy = extract_xy_policy(out.lp, out.solution, model);
  return out;
}

std::vector<HullPoint> upper_concave_envelope(std::vector<HullPoint> points) {
  std::sort(points.begin(), points.end(), [](const HullPoint& a, const HullPoint& b) {
    if (a.demand != b.demand) return a.demand < b.demand;
    if (a.revenue != b.revenue) return a.revenue > b.revenue;
    return a.option < b.option;
  });
  std::vector<HullPoint> hull;
  for (const auto& p : points) {
    if (!hull.empty() && hull.back().demand == p.demand) continue;
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      // drop a unless it lies strictly above the chord o -> p
      const double cross =
          (a.demand - o.demand) * (p.revenue - o.revenue) - (a.revenue - o.revenue) * (p.demand - o.demand);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return hull;
}

std::vector<SupportPoint> two_point_support(int k, const DemandState& y, const PlantConfig& cfg,
                                            double target, double* r_star) {
  std::vector<HullPoint> pts;
  for (int o = 0; o < num_price_options(cfg, k); ++o) {
    const auto opt = price_option(o);
    const double f = opt.z ? y.F[k][opt.price_idx] : 0.0;
    const double margin = opt.z ? cfg.price(k, opt.price_idx) - cfg.alpha[k] : 0.0;
    pts.push_back(HullPoint{f, margin * f, o});
  }
  const auto hull = upper_concave_envelope(std::move(pts));
  constexpr double kTol = 1e-9;
  const double top = hull.back().demand;
  if (target < -kTol || target > top + kTol) {
    std::ostringstream os;
    os << "demand " << target << " outside [0, " << top << "] for product " << k << " in '"
       << y.id << "'";
    throw PlantError(Errc::TargetOutsideHull, os.str());
  }
  target = std::clamp(target, 0.0, top);

  std::vector<SupportPoint> out;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (hull[i].demand == target) {
      out.push_back({hull[i].option, 1.0});
      if (r_star) *r_star = hull[i].revenue;
      return out;
    }
    if (i + 1 < hull.size() && hull[i].demand < target && target < hull[i + 1].demand) {
      const double eta2 = (target - hull[i].demand) / (hull[i + 1].demand - hull[i].demand);
      out.push_back({hull[i].option, 1.0 - eta2});
      out.push_back({hull[i + 1].option, eta2});
      if (r_star) *r_star = (1.0 - eta2) * hull[i].revenue + eta2 * hull[i + 1].revenue;
      return out;
    }
  }
  throw PlantError(Errc::TargetOutsideHull, "no hull segment contains the target demand");
}

TwoPricePolicy two_price_reduce(const OraclePolicy& policy, const Model& model) {
  const auto& cfg = model.cfg;
  const int K = model.K();
  const std::size_t ny = model.demand.size();
  if (policy.price_dist.size() != static_cast<std::size_t>(K))
    throw PlantError(Errc::DimensionMismatch, "policy has wrong number of products");
  TwoPricePolicy out;
  out.support.assign(K, std::vector<std::vector<SupportPoint>>(ny));
  out.r_star.assign(K, std::vector<double>(ny, 0.0));
  out.r_hat = out.r_star;
  out.d_hat = out.r_star;
  out.d_star = out.r_star;
  for (int k = 0; k < K; ++k) {
    for (std::size_t y = 0; y < ny; ++y) {
      const auto& dy = model.demand[y];
      const auto agg = pricing_aggregate(policy.price_dist[k][y], k, dy, cfg);
      out.r_hat[k][y] = agg.revenue;
      out.d_hat[k][y] = agg.demand;
      double r = 0.0;
      out.support[k][y] = two_point_support(k, dy, cfg, agg.demand, &r);
      out.r_star[k][y] = r;
      double d = 0.0;
      for (const auto& sp : out.support[k][y]) {
        const auto opt = price_option(sp.option);
        if (opt.z) d += sp.eta * dy.F[k][opt.price_idx];
      }
      out.d_star[k][y] = d;
    }
  }
  return out;
}

LookaheadResult lookahead_value(const Model& model, std::span<const int> x_seq,
                                std::span<const int> y_seq) {
  const auto& cfg = model.cfg;
  const int M = model.M();
  const int K = model.K();
  if (x_seq.size() != y_seq.size() || x_seq.empty())
    throw PlantError(Errc::DimensionMismatch, "lookahead frame needs equal, non-empty sequences");
  const int T = static_cast<int>(x_seq.size());

  LinearProgram lp;
  std::vector<std::vector<CountVec>> actions(T);
  std::vector<std::vector<int>> avar(T);
  std::vector<std::vector<std::vector<int>>> ovar(T, std::vector<std::vector<int>>(K));
  for (int t = 0; t < T; ++t) {
    const auto& x = model.supply.at(x_seq[t]);
    const auto& y = model.demand.at(y_seq[t]);
    actions[t] = enumerate_actions(cfg, x);
    for (const auto& a : actions[t])
      avar[t].push_back(lp.add_var(-static_cast<double>(purchase_cost(a, x)), 1.0));
    for (int k = 0; k < K; ++k) {
      for (int o = 0; o < num_price_options(cfg, k); ++o) {
        const auto opt = price_option(o);
        const double obj =
            opt.z ? (cfg.price(k, opt.price_idx) - cfg.alpha[k]) * y.F[k][opt.price_idx] : 0.0;
        ovar[t][k].push_back(lp.add_var(obj, 1.0));
      }
    }
  }
  const int n = lp.num_vars();
  for (int t = 0; t < T; ++t) {
    std::vector<double> row(n, 0.0);
    for (int v : avar[t]) row[v] = 1.0;
    lp.add_row(std::move(row), RowSense::Equal, 1.0);
    for (int k = 0; k < K; ++k) {
      std::vector<double> krow(n, 0.0);
      for (int v : ovar[t][k]) krow[v] = 1.0;
      lp.add_row(std::move(krow), RowSense::Equal, 1.0);
    }
  }
  // frame purchases equal expected frame consumption
  for (int m = 0; m < M; ++m) {
    std::vector<double> row(n, 0.0);
    for (int t = 0; t < T; ++t) {
      const auto& y = model.demand[y_seq[t]];
      for (std::size_t i = 0; i < actions[t].size(); ++i)
        row[avar[t][i]] += static_cast<double>(actions[t][i][m]);
      for (int k = 0; k < K; ++k) {
        if (!cfg.uses(m, k)) continue;
        for (int o = 1; o < num_price_options(cfg, k); ++o)
          row[ovar[t][k][o]] -=
              static_cast<double>(cfg.beta[m][k]) * y.F[k][price_option(o).price_idx];
      }
    }
    lp.add_row(std::move(row), RowSense::Equal, 0.0);
  }

  const auto sol = solve_lp(lp);
  LookaheadResult out;
  out.phi_T = sol.value;
  out.expected_purchase.assign(T, std::vector<double>(M, 0.0));
  out.expected_sales.assign(T, std::vector<double>(K, 0.0));
  for (int t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < actions[t].size(); ++i)
      for (int m = 0; m < M; ++m)
        out.expected_purchase[t][m] += sol.x[avar[t][i]] * static_cast<double>(actions[t][i][m]);
    const auto& y = model.demand[y_seq[t]];
    for (int k = 0; k < K; ++k)
      for (int o = 1; o < num_price_options(cfg, k); ++o)
        out.expected_sales[t][k] += sol.x[ovar[t][k][o]] * y.F[k][price_option(o).price_idx];
  }
  return out;
}

}  // namespace plant
