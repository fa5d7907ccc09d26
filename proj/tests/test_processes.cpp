#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "plant/processes.hpp"

using namespace plant;

namespace {

// pi (I - P) = 0 with sum pi = 1, by Gaussian elimination with partial pivoting.
std::vector<double> solve_stationary(const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - P[j][i];
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

}  // namespace

TEST(Process, DegenerateIid) {
  StateProcess p(StateProcessSpec::iid({1.0}));
  RngStream rng(1, 0);
  for (Count t = 0; t < 100; ++t) EXPECT_EQ(p.next_state(t, rng), 0);
}

TEST(Process, AbsorbingMarkov) {
  StateProcess p(StateProcessSpec::markov({{1.0, 0.0}, {0.0, 1.0}}, 1));
  RngStream rng(1, 0);
  for (Count t = 0; t < 100; ++t) EXPECT_EQ(p.next_state(t, rng), 1);
}

TEST(Process, TraceExhausted) {
  StateProcess p(StateProcessSpec::from_trace({0, 1}));
  RngStream rng(1, 0);
  EXPECT_EQ(p.next_state(0, rng), 0);
  EXPECT_EQ(p.next_state(1, rng), 1);
  try {
    p.next_state(2, rng);
    FAIL();
  } catch (const PlantError& e) {
    EXPECT_EQ(e.code(), Errc::TraceExhausted);
  }
}

TEST(Process, Validation) {
  EXPECT_THROW(validate_process(StateProcessSpec::iid({0.5, 0.4}), 2), PlantError);
  EXPECT_THROW(validate_process(StateProcessSpec::iid({1.0}), 2), PlantError);
  EXPECT_THROW(validate_process(StateProcessSpec::markov({{0.5, 0.5}}, 0), 2), PlantError);
  EXPECT_THROW(validate_process(StateProcessSpec::from_trace({0, 2}), 2), PlantError);
  EXPECT_NO_THROW(validate_process(StateProcessSpec::markov({{0.5, 0.5}, {0.1, 0.9}}, 1), 2));
}

TEST(Stationary, Examples) {
  EXPECT_NEAR(stationary_distribution({{1.0}})[0], 1.0, 1e-12);
  const auto sym = stationary_distribution({{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_NEAR(sym[0], 0.5, 1e-12);
  EXPECT_NEAR(sym[1], 0.5, 1e-12);
  const std::vector<std::vector<double>> P{{0.9, 0.1}, {0.2, 0.8}};
  const auto pi = stationary_distribution(P);
  const auto ref = solve_stationary(P);
  EXPECT_NEAR(pi[0], ref[0], 1e-10);
  EXPECT_NEAR(pi[1], ref[1], 1e-10);
  EXPECT_NEAR(ref[0], 2.0 / 3.0, 1e-12);
}

TEST(Stationary, ThreeStateAgainstLinearSolve) {
  const std::vector<std::vector<double>> P{{0.5, 0.3, 0.2}, {0.1, 0.6, 0.3}, {0.4, 0.1, 0.5}};
  const auto pi = stationary_distribution(P);
  const auto ref = solve_stationary(P);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pi[i], ref[i], 1e-10);
}

TEST(Stationary, RejectsNonErgodic) {
  auto code = [](const std::vector<std::vector<double>>& P) {
    try {
      stationary_distribution(P);
    } catch (const PlantError& e) {
      return e.code();
    }
    return Errc::ParseError;
  };
  EXPECT_EQ(code({{1.0, 0.0}, {0.0, 1.0}}), Errc::NotErgodic);
  EXPECT_EQ(code({{0.0, 1.0}, {1.0, 0.0}}), Errc::NotErgodic);
}

TEST(Demand, Extremes) {
  auto cfg = test::i1_config();
  RngStream rng(3, 0);
  const DemandState zero{"z", {{0.0, 0.0}}, {}};
  const DemandState full{"f", {{2.0, 2.0}}, {}};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(realize_demand(0, 1, zero, cfg, rng), 0);
    EXPECT_EQ(realize_demand(0, 0, full, cfg, rng), 2);
  }
}

TEST(Demand, MeanMatchesF) {
  const auto cfg = test::i1_config();
  const auto y = test::i1_demand();
  RngStream rng(11, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = static_cast<double>(realize_demand(0, 1, y, cfg, rng));
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 1.0, 0.01);
  EXPECT_LE(std::abs(mean - 1.0), 3.0 * se);
}

TEST(Process, IidFrequencies) {
  StateProcess p(StateProcessSpec::iid({0.2, 0.5, 0.3}));
  RngStream rng(5, 0);
  std::vector<double> f(3, 0.0);
  const int n = 1'000'000;
  for (int t = 0; t < n; ++t) f[p.next_state(t, rng)] += 1.0 / n;
  EXPECT_NEAR(f[0], 0.2, 0.005);
  EXPECT_NEAR(f[1], 0.5, 0.005);
  EXPECT_NEAR(f[2], 0.3, 0.005);
}

TEST(Process, MarkovFrequencies) {
  const std::vector<std::vector<double>> P{{0.9, 0.1}, {0.2, 0.8}};
  StateProcess p(StateProcessSpec::markov(P, 1));
  RngStream rng(6, 0);
  const int n = 1'000'000;
  double f0 = 0.0;
  for (int t = 0; t < n; ++t) f0 += p.next_state(t, rng) == 0 ? 1.0 / n : 0.0;
  EXPECT_NEAR(f0, 2.0 / 3.0, 0.01);
}

TEST(Process, Deterministic) {
  RngStream a(99, 4);
  RngStream b(99, 4);
  RngStream c(99, 5);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    differs = differs || u != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Process, LongRunDistribution) {
  const auto tr = long_run_distribution(StateProcessSpec::from_trace({0, 0, 1, 0}), 2);
  EXPECT_DOUBLE_EQ(tr[0], 0.75);
  EXPECT_DOUBLE_EQ(tr[1], 0.25);
  const auto iid = long_run_distribution(StateProcessSpec::iid({0.4, 0.6}), 2);
  EXPECT_DOUBLE_EQ(iid[1], 0.6);
}
