#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "plant/controller.hpp"
#include "plant/knapsack.hpp"

using namespace plant;
using plant::test::i1;

namespace {

Model two_material() {
  PlantConfig cfg;
  cfg.num_materials = 2;
  cfg.num_products = 1;
  cfg.beta = {{1}, {2}};
  cfg.alpha = {0.0};
  cfg.price_set = {{1.0, 3.0}};
  cfg.d_max = {2};
  cfg.a_max = {2, 2};
  cfg.c_max = 4;
  return validate_config(cfg, {SupplyState{"x", {1, 1}, {2, 2}}},
                         {DemandState{"y", {{2.0, 1.0}}, {}}});
}

// Demand with F = h * F_hat for two states with different scales.
Model factorized() {
  PlantConfig cfg;
  cfg.num_materials = 2;
  cfg.num_products = 2;
  cfg.beta = {{1, 1}, {0, 2}};
  cfg.alpha = {0.5, 1.0};
  cfg.price_set = {{1.0, 2.0, 3.0}, {2.0, 4.0}};
  cfg.d_max = {3, 2};
  cfg.a_max = {3, 3};
  cfg.c_max = 5;
  const std::vector<std::vector<double>> f_hat{{1.0, 0.6, 0.25}, {1.0, 0.35}};
  std::vector<DemandState> ys;
  for (double scale : {0.5, 1.0}) {
    DemandFactorization fac{{3.0 * scale, 2.0 * scale}, f_hat};
    DemandState y{"y" + std::to_string(ys.size()), {}, fac};
    for (int k = 0; k < 2; ++k) {
      std::vector<double> row;
      for (double f : f_hat[k]) row.push_back(fac.h[k] * f);
      y.F.push_back(row);
    }
    ys.push_back(std::move(y));
  }
  return validate_config(cfg, {SupplyState{"x", {1, 1}, {3, 3}}}, ys);
}

}  // namespace

TEST(Theta, Examples) {
  const auto m = i1();
  EXPECT_DOUBLE_EQ(compute_theta(m.cfg, m.mu_max, 10.0)[0], 24.0);
  EXPECT_DOUBLE_EQ(compute_theta(m.cfg, m.mu_max, 0.0)[0], 4.0);
  const auto m2 = two_material();
  EXPECT_EQ(m2.mu_max, (CountVec{2, 4}));
  const auto th = compute_theta(m2.cfg, m2.mu_max, 10.0);
  EXPECT_DOUBLE_EQ(th[0], 38.0);
  EXPECT_DOUBLE_EQ(th[1], 24.0);
}

TEST(Theta, Overrides) {
  const auto m = i1();
  EXPECT_DOUBLE_EQ(make_controller_params(m, 10.0, false, false, std::vector<double>{30.0}).theta[0],
                   30.0);
  try {
    make_controller_params(m, 10.0, false, false, std::vector<double>{20.0});
    FAIL();
  } catch (const PlantError& e) {
    EXPECT_EQ(e.code(), Errc::ThetaBelowSafe);
  }
  const auto unsafe = make_controller_params(m, 10.0, false, false, std::vector<double>{20.0}, true);
  EXPECT_FALSE(unsafe.check_bounds);
  EXPECT_THROW(make_controller_params(m, 0.0), PlantError);
}

TEST(Indicators, Examples) {
  const auto m = i1();
  EXPECT_EQ(compute_indicators(CountVec{1}, m), std::vector<int>{1});
  EXPECT_EQ(compute_indicators(CountVec{2}, m), std::vector<int>{0});
  EXPECT_EQ(compute_indicators(CountVec{10, 1}, two_material()), std::vector<int>{1});
  EXPECT_EQ(compute_indicators(CountVec{2, 4}, two_material()), std::vector<int>{0});
}

TEST(Purchase, Examples) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  EXPECT_EQ(decide_purchase(CountVec{5}, m.supply[0], p, m), CountVec{2});
  EXPECT_EQ(decide_purchase(CountVec{30}, m.supply[0], p, m), CountVec{0});
  // w = 10 + Q - 24 = 0 at Q = 14: no strict gain, nothing bought.
  EXPECT_EQ(decide_purchase(CountVec{14}, m.supply[0], p, m), CountVec{0});
  EXPECT_EQ(decide_purchase(CountVec{13}, m.supply[0], p, m), CountVec{2});
}

TEST(Purchase, BudgetBindsKnapsack) {
  const std::vector<KnapsackItem> items{{5.0, 1, 1}, {3.0, 1, 1}};
  EXPECT_EQ(solve_bounded_knapsack(items, 1), (CountVec{1, 0}));
  EXPECT_EQ(solve_bounded_knapsack(items, 2), (CountVec{1, 1}));
  EXPECT_EQ(solve_bounded_knapsack(items, 0), (CountVec{0, 0}));
  // Equal value: lexicographically smallest optimum.
  const std::vector<KnapsackItem> tie{{2.0, 1, 2}, {2.0, 1, 2}};
  EXPECT_EQ(solve_bounded_knapsack(tie, 2), (CountVec{0, 2}));
  // Density is not optimal here: one heavy item beats two light ones.
  const std::vector<KnapsackItem> dense{{3.0, 2, 1}, {5.0, 3, 1}};
  EXPECT_EQ(solve_bounded_knapsack(dense, 3), (CountVec{0, 1}));
}

TEST(Purchase, KnapsackMatchesEnumeration) {
  RngStream rng(17, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<KnapsackItem> items;
    for (int i = 0; i < 3; ++i)
      items.push_back({rng.uniform() * 10.0 - 2.0, static_cast<Count>(rng.uniform() * 4),
                       static_cast<Count>(rng.uniform() * 4)});
    const Count cap = static_cast<Count>(rng.uniform() * 9);
    const auto q = solve_bounded_knapsack(items, cap);
    double best = 0.0;
    for (Count a = 0; a <= items[0].bound; ++a)
      for (Count b = 0; b <= items[1].bound; ++b)
        for (Count c = 0; c <= items[2].bound; ++c) {
          if (a * items[0].weight + b * items[1].weight + c * items[2].weight > cap) continue;
          best = std::max(best, a * items[0].value + b * items[1].value + c * items[2].value);
        }
    double got = 0.0;
    Count w = 0;
    for (int i = 0; i < 3; ++i) {
      got += static_cast<double>(q[i]) * items[i].value;
      w += q[i] * items[i].weight;
      EXPECT_LE(q[i], items[i].bound);
    }
    EXPECT_LE(w, cap);
    EXPECT_NEAR(got, best, 1e-9);
  }
}

TEST(Purchase, BudgetBindsController) {
  auto cfg = two_material().cfg;
  cfg.c_max = 1;
  cfg.a_max = {1, 1};
  const auto m = validate_config(cfg, {SupplyState{"x", {1, 1}, {1, 1}}},
                                 {DemandState{"y", {{2.0, 1.0}}, {}}});
  auto p = make_controller_params(m, 10.0);
  // w = V x + Q - theta = [-5, -3]
  const CountVec Q{static_cast<Count>(p.theta[0]) - 15, static_cast<Count>(p.theta[1]) - 13};
  EXPECT_EQ(decide_purchase(Q, m.supply[0], p, m), (CountVec{1, 0}));
}

TEST(Pricing, Examples) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  auto d = decide_pricing(CountVec{5}, m.demand[0], p, m);
  EXPECT_EQ(d.Z, std::vector<int>{1});
  EXPECT_EQ(d.price_idx, std::vector<int>{1});
  d = decide_pricing(CountVec{4}, m.demand[0], p, m);
  EXPECT_EQ(d.Z, std::vector<int>{0});
  d = decide_pricing(CountVec{1}, m.demand[0], p, m);
  EXPECT_EQ(d.Z, std::vector<int>{0});
}

TEST(Pricing, TieGoesToLowestPrice) {
  auto cfg = test::i1_config();
  // g(1) = 10 * 1 * 2 + 2 s, g(2) = 10 * 2 * 1 + 1 s; equal at s = 0, i.e. Q = theta.
  const auto m = validate_config(cfg, {test::i1_supply()}, {test::i1_demand()});
  const auto p = make_controller_params(m, 10.0);
  const auto d = decide_pricing(CountVec{24}, m.demand[0], p, m);
  EXPECT_EQ(d.Z, std::vector<int>{1});
  EXPECT_EQ(d.price_idx, std::vector<int>{0});
}

TEST(Step, Example) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  auto st = init_state(m, p, CountVec{5});
  const auto dec = decide(st, m.supply[0], m.demand[0], p, m);
  EXPECT_EQ(dec.A, CountVec{2});
  EXPECT_EQ(dec.Z, std::vector<int>{1});
  EXPECT_EQ(dec.price_idx, std::vector<int>{1});
  const auto rec = apply_demand(st, dec, CountVec{1}, m.supply[0], p, m);
  EXPECT_EQ(st.Q, CountVec{6});
  EXPECT_DOUBLE_EQ(rec.outcome.phi, 0.0);
  EXPECT_DOUBLE_EQ(rec.outcome.phi_actual, 0.0);
  EXPECT_DOUBLE_EQ(rec.drift_term, 0.5);
  EXPECT_EQ(st.slot, 1);
}

TEST(Step, UpperCorner) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  auto st = init_state(m, p, CountVec{26});
  RngStream rng(1, 0);
  const auto rec = controller_step(st, m.supply[0], m.demand[0], rng, p, m);
  EXPECT_EQ(rec.decision.A, CountVec{0});
  EXPECT_LE(st.Q[0], 26);
}

TEST(Step, LowerCorner) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  auto st = init_state(m, p, CountVec{2});
  RngStream rng(1, 0);
  const auto rec = controller_step(st, m.supply[0], m.demand[0], rng, p, m);
  EXPECT_GE(st.Q[0], 2);
  EXPECT_EQ(rec.outcome.D_tilde, rec.outcome.D);
}

TEST(Step, InitRange) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  EXPECT_THROW(init_state(m, p, CountVec{1}), PlantError);
  EXPECT_THROW(init_state(m, p, CountVec{27}), PlantError);
  EXPECT_NO_THROW(init_state(m, p, CountVec{26}));
}

TEST(Placeholder, Init) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0, false, true);
  const auto st = init_placeholder(m, p, CountVec{0});
  EXPECT_EQ(st.Q, CountVec{2});
  EXPECT_EQ(st.actual(), CountVec{0});
  EXPECT_EQ(init_placeholder(m, p, CountVec{24}).Q, CountVec{26});
  EXPECT_THROW(init_placeholder(m, p, CountVec{25}), PlantError);
}

TEST(Placeholder, MatchesShiftedStart) {
  const auto m = i1();
  const auto pp = make_controller_params(m, 10.0, false, true);
  const auto pd = make_controller_params(m, 10.0);
  auto a = init_placeholder(m, pp, CountVec{0});
  auto b = init_state(m, pd, CountVec{2});
  RngStream ra(8, 0);
  RngStream rb(8, 0);
  for (int t = 0; t < 10'000; ++t) {
    const auto x = controller_step(a, m.supply[0], m.demand[0], ra, pp, m);
    const auto y = controller_step(b, m.supply[0], m.demand[0], rb, pd, m);
    ASSERT_EQ(x.decision.A, y.decision.A);
    ASSERT_EQ(x.decision.Z, y.decision.Z);
    ASSERT_EQ(x.decision.price_idx, y.decision.price_idx);
    ASSERT_EQ(x.outcome.phi_actual, y.outcome.phi_actual);
    ASSERT_EQ(a.actual()[0] + 2, b.Q[0]);
  }
}

TEST(DemandBlind, SameDecisions) {
  const auto m = factorized();
  const auto with_y = make_controller_params(m, 7.0);
  const auto blind = make_controller_params(m, 7.0, true);
  for (Count q0 = m.mu_max[0]; q0 <= static_cast<Count>(with_y.theta[0]) + 3; ++q0)
    for (Count q1 = m.mu_max[1]; q1 <= static_cast<Count>(with_y.theta[1]) + 3; ++q1)
      for (const auto& y : m.demand) {
        const CountVec Q{q0, q1};
        const auto a = decide_pricing(Q, y, with_y, m);
        const auto b = decide_pricing(Q, y, blind, m);
        ASSERT_EQ(a.Z, b.Z);
        for (int k = 0; k < m.K(); ++k)
          if (a.Z[k]) ASSERT_EQ(a.price_idx[k], b.price_idx[k]);
      }
}

TEST(DemandBlind, RequiresFactorization) {
  EXPECT_THROW(make_controller_params(i1(), 10.0, true), PlantError);
}

TEST(Bounds, Within) {
  const auto m = i1();
  const auto p = make_controller_params(m, 10.0);
  EXPECT_TRUE(within_bounds(CountVec{2}, m, p));
  EXPECT_TRUE(within_bounds(CountVec{26}, m, p));
  EXPECT_FALSE(within_bounds(CountVec{27}, m, p));
  EXPECT_FALSE(within_bounds(CountVec{1}, m, p));
  EXPECT_DOUBLE_EQ(queue_ceiling(m, p)[0], 26.0);
}
