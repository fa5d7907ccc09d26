#include "plant/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace plant {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyPriceSet: return "EmptyPriceSet";
    case Errc::DemandExceedsCap: return "DemandExceedsCap";
    case Errc::OrphanProduct: return "OrphanProduct";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TraceExhausted: return "TraceExhausted";
    case Errc::NotErgodic: return "NotErgodic";
    case Errc::BadProcessSpec: return "BadProcessSpec";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::InitOutOfRange: return "InitOutOfRange";
    case Errc::ThetaBelowSafe: return "ThetaBelowSafe";
    case Errc::Infeasible: return "Infeasible";
    case Errc::Unbounded: return "Unbounded";
    case Errc::ActionSpaceTooLarge: return "ActionSpaceTooLarge";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::NormalizationFailure: return "NormalizationFailure";
    case Errc::TargetOutsideHull: return "TargetOutsideHull";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(Errc code, const std::string& msg) { throw PlantError(code, msg); }

void require_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    std::ostringstream os;
    os << what << " has " << got << " entries, expected " << want;
    fail(Errc::DimensionMismatch, os.str());
  }
}

void check_config(const PlantConfig& cfg) {
  const int M = cfg.num_materials;
  const int K = cfg.num_products;
  if (M <= 0 || K <= 0) fail(Errc::DimensionMismatch, "M and K must be positive");
  require_size(cfg.beta.size(), M, "beta");
  for (int m = 0; m < M; ++m) {
    require_size(cfg.beta[m].size(), K, "beta[" + std::to_string(m) + "]");
    for (int k = 0; k < K; ++k)
      if (cfg.beta[m][k] < 0) fail(Errc::NegativeEntry, "beta has a negative entry");
  }
  require_size(cfg.alpha.size(), K, "alpha");
  require_size(cfg.price_set.size(), K, "price_set");
  require_size(cfg.d_max.size(), K, "D_max");
  require_size(cfg.a_max.size(), M, "A_max");
  for (int k = 0; k < K; ++k) {
    if (!(cfg.alpha[k] >= 0.0) || !std::isfinite(cfg.alpha[k]))
      fail(Errc::NegativeEntry, "alpha[" + std::to_string(k) + "] must be finite and >= 0");
    const auto& ps = cfg.price_set[k];
    if (ps.empty()) fail(Errc::EmptyPriceSet, "price_set[" + std::to_string(k) + "] is empty");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!(ps[i] >= 0.0) || !std::isfinite(ps[i]))
        fail(Errc::NegativeEntry, "price_set[" + std::to_string(k) + "] has a negative price");
      if (i > 0 && !(ps[i] > ps[i - 1]))
        fail(Errc::ValidationError,
             "price_set[" + std::to_string(k) + "] is not strictly ascending");
    }
    if (cfg.d_max[k] <= 0)
      fail(Errc::NegativeEntry, "D_max[" + std::to_string(k) + "] must be positive");
    bool fed = false;
    for (int m = 0; m < M; ++m) fed = fed || cfg.beta[m][k] > 0;
    if (!fed) fail(Errc::OrphanProduct, "product " + std::to_string(k) + " uses no material");
  }
  for (int m = 0; m < M; ++m)
    if (cfg.a_max[m] <= 0)
      fail(Errc::NegativeEntry, "A_max[" + std::to_string(m) + "] must be positive");
  if (cfg.c_max < 0) fail(Errc::NegativeEntry, "c_max must be >= 0");
}

void check_supply(const PlantConfig& cfg, const SupplyState& x) {
  require_size(x.unit_cost.size(), cfg.num_materials, "supply state '" + x.id + "' unit_cost");
  require_size(x.available.size(), cfg.num_materials, "supply state '" + x.id + "' available");
  for (int m = 0; m < cfg.num_materials; ++m)
    if (x.unit_cost[m] < 0 || x.available[m] < 0)
      fail(Errc::NegativeEntry, "supply state '" + x.id + "' has a negative entry");
}

void check_demand(const PlantConfig& cfg, const DemandState& y) {
  const int K = cfg.num_products;
  require_size(y.F.size(), K, "demand state '" + y.id + "' F");
  for (int k = 0; k < K; ++k) {
    require_size(y.F[k].size(), cfg.price_set[k].size(),
                 "demand state '" + y.id + "' F[" + std::to_string(k) + "]");
    for (double f : y.F[k]) {
      if (!(f >= 0.0) || !std::isfinite(f))
        fail(Errc::NegativeEntry, "demand state '" + y.id + "' has a negative demand");
      if (f > static_cast<double>(cfg.d_max[k])) {
        std::ostringstream os;
        os << "demand state '" << y.id << "' F[" << k << "] = " << f << " exceeds D_max "
           << cfg.d_max[k];
        fail(Errc::DemandExceedsCap, os.str());
      }
    }
  }
  if (!y.factor) return;
  const auto& fac = *y.factor;
  require_size(fac.h.size(), K, "demand state '" + y.id + "' h");
  require_size(fac.f_hat.size(), K, "demand state '" + y.id + "' F_hat");
  for (int k = 0; k < K; ++k) {
    require_size(fac.f_hat[k].size(), cfg.price_set[k].size(),
                 "demand state '" + y.id + "' F_hat[" + std::to_string(k) + "]");
    if (!(fac.h[k] >= 0.0)) fail(Errc::NegativeEntry, "demand scale h must be >= 0");
    for (std::size_t p = 0; p < fac.f_hat[k].size(); ++p) {
      const double f_hat = fac.f_hat[k][p];
      if (!(f_hat >= 0.0)) fail(Errc::NegativeEntry, "F_hat must be >= 0");
      const double want = fac.h[k] * f_hat;
      if (std::abs(want - y.F[k][p]) > 1e-12 * std::max(1.0, std::abs(want)))
        fail(Errc::ValidationError,
             "demand state '" + y.id + "': F differs from h * F_hat");
    }
  }
}

}  // namespace

int Model::supply_index(const std::string& id) const {
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i].id == id) return static_cast<int>(i);
  return -1;
}

int Model::demand_index(const std::string& id) const {
  for (std::size_t i = 0; i < demand.size(); ++i)
    if (demand[i].id == id) return static_cast<int>(i);
  return -1;
}

SlotDecision idle_decision(const PlantConfig& cfg) {
  return SlotDecision{CountVec(cfg.num_materials, 0), std::vector<int>(cfg.num_products, 0),
                      std::vector<int>(cfg.num_products, 0)};
}

CountVec compute_mu_max(const PlantConfig& cfg) {
  CountVec mu(cfg.num_materials, 0);
  for (int m = 0; m < cfg.num_materials; ++m)
    for (int k = 0; k < cfg.num_products; ++k) mu[m] += cfg.beta[m][k] * cfg.d_max[k];
  return mu;
}

Model validate_config(PlantConfig cfg, std::vector<SupplyState> supply,
                      std::vector<DemandState> demand) {
  check_config(cfg);
  if (supply.empty()) fail(Errc::ValidationError, "no supply states");
  if (demand.empty()) fail(Errc::ValidationError, "no demand states");
  std::set<std::string> ids;
  for (const auto& x : supply) {
    check_supply(cfg, x);
    if (!ids.insert(x.id).second) fail(Errc::ValidationError, "duplicate supply id '" + x.id + "'");
  }
  ids.clear();
  for (const auto& y : demand) {
    check_demand(cfg, y);
    if (!ids.insert(y.id).second) fail(Errc::ValidationError, "duplicate demand id '" + y.id + "'");
  }

  Model model{std::move(cfg), std::move(supply), std::move(demand), {}, {}};
  model.mu_max = compute_mu_max(model.cfg);
  for (int m = 0; m < model.M(); ++m) {
    bool used = false;
    for (int k = 0; k < model.K(); ++k) used = used || model.cfg.uses(m, k);
    if (!used)
      model.warnings.push_back("material " + std::to_string(m) +
                               " is used by no product; its threshold is set to 0");
  }
  return model;
}

Count purchase_cost(std::span<const Count> A, const SupplyState& x) {
  Count total = 0;
  for (std::size_t m = 0; m < A.size(); ++m) total += x.unit_cost[m] * A[m];
  return total;
}

namespace {

double profit_with(const SlotDecision& dec, std::span<const Count> sold, const SupplyState& x,
                   const PlantConfig& cfg) {
  double revenue = 0.0;
  for (int k = 0; k < cfg.num_products; ++k) {
    if (!dec.Z[k]) continue;
    revenue += static_cast<double>(sold[k]) * (cfg.price(k, dec.price_idx[k]) - cfg.alpha[k]);
  }
  return revenue - static_cast<double>(purchase_cost(dec.A, x));
}

}  // namespace

double nominal_profit(const SlotDecision& dec, std::span<const Count> D, const SupplyState& x,
                      const PlantConfig& cfg) {
  return profit_with(dec, D, x, cfg);
}

double actual_profit(const SlotDecision& dec, std::span<const Count> D_tilde,
                     const SupplyState& x, const PlantConfig& cfg) {
  return profit_with(dec, D_tilde, x, cfg);
}

CountVec material_consumption(const PlantConfig& cfg, std::span<const Count> sold) {
  CountVec mu(cfg.num_materials, 0);
  for (int m = 0; m < cfg.num_materials; ++m)
    for (int k = 0; k < cfg.num_products; ++k) mu[m] += cfg.beta[m][k] * sold[k];
  return mu;
}

CountVec schedule_fulfillment(std::span<const Count> Q, const SlotDecision& dec,
                              std::span<const Count> D, const PlantConfig& cfg) {
  const int K = cfg.num_products;
  const int M = cfg.num_materials;
  CountVec want(K, 0);
  for (int k = 0; k < K; ++k) want[k] = dec.Z[k] ? D[k] : 0;

  const CountVec need = material_consumption(cfg, want);
  bool enough = true;
  for (int m = 0; m < M; ++m) enough = enough && need[m] <= Q[m];
  if (enough) return want;

  std::vector<int> order;
  for (int k = 0; k < K; ++k)
    if (want[k] > 0) order.push_back(k);
  auto margin = [&](int k) { return cfg.price(k, dec.price_idx[k]) - cfg.alpha[k]; };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return margin(a) > margin(b); });

  CountVec residual(Q.begin(), Q.end());
  CountVec sold(K, 0);
  for (int k : order) {
    Count fit = want[k];
    for (int m = 0; m < M; ++m)
      if (cfg.beta[m][k] > 0) fit = std::min(fit, std::max<Count>(residual[m], 0) / cfg.beta[m][k]);
    sold[k] = fit;
    for (int m = 0; m < M; ++m) residual[m] -= cfg.beta[m][k] * fit;
  }
  return sold;
}

CountVec queue_update(std::span<const Count> Q, std::span<const Count> D_tilde,
                      std::span<const Count> A, const PlantConfig& cfg) {
  const CountVec used = material_consumption(cfg, D_tilde);
  CountVec next(cfg.num_materials);
  for (int m = 0; m < cfg.num_materials; ++m)
    next[m] = std::max<Count>(Q[m] - used[m], 0) + A[m];
  return next;
}

double lyapunov(std::span<const Count> Q, std::span<const double> theta) {
  double sum = 0.0;
  for (std::size_t m = 0; m < Q.size(); ++m) {
    const double d = static_cast<double>(Q[m]) - theta[m];
    sum += d * d;
  }
  return 0.5 * sum;
}

double drift_constant(const PlantConfig& cfg, std::span<const Count> mu_max) {
  double sum = 0.0;
  for (int m = 0; m < cfg.num_materials; ++m) {
    const double a = static_cast<double>(cfg.a_max[m]);
    const double u = static_cast<double>(mu_max[m]);
    sum += std::max(a * a, u * u);
  }
  return 0.5 * sum;
}

}  // namespace plant
