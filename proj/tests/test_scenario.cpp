#include <gtest/gtest.h>

#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "plant/scenario.hpp"

using namespace plant;

namespace {

const std::string kI1 = R"({
  "M": 1, "K": 1,
  "beta": [[1]], "alpha": [0], "price_set": [[1, 2]],
  "D_max": [2], "A_max": [2], "c_max": 2,
  "supply_states": [{"id": "x", "unit_cost": [1], "available": [2]}],
  "demand_states": [{"id": "y", "F": [[2, 1]]}],
  "process_x": {"mode": "iid", "probs": [1.0]},
  "process_y": {"mode": "iid", "probs": [1.0]}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

PlantError error_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const PlantError& e) {
    return e;
  }
  ADD_FAILURE() << "accepted";
  return PlantError(Errc::ParseError, "");
}

}  // namespace

TEST(Scenario, BundledFixtureIsI1) {
  const auto s = parse_scenario(PLANT_DATA_DIR "/i1.scenario");
  const auto ref = test::i1();
  EXPECT_EQ(s.model.cfg.beta, ref.cfg.beta);
  EXPECT_EQ(s.model.cfg.alpha, ref.cfg.alpha);
  EXPECT_EQ(s.model.cfg.price_set, ref.cfg.price_set);
  EXPECT_EQ(s.model.cfg.d_max, ref.cfg.d_max);
  EXPECT_EQ(s.model.cfg.a_max, ref.cfg.a_max);
  EXPECT_EQ(s.model.cfg.c_max, ref.cfg.c_max);
  EXPECT_EQ(s.model.supply[0].unit_cost, ref.supply[0].unit_cost);
  EXPECT_EQ(s.model.supply[0].available, ref.supply[0].available);
  EXPECT_EQ(s.model.demand[0].F, ref.demand[0].F);
  EXPECT_EQ(s.model.mu_max, CountVec{2});
  EXPECT_DOUBLE_EQ(s.V, 10.0);
}

TEST(Scenario, UnknownKeyNamed) {
  const auto e = error_of(replace(kI1, "\"M\": 1", "\"M\": 1, \"foo\": 3"));
  EXPECT_EQ(e.code(), Errc::ParseError);
  EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);

  const auto nested = error_of(replace(kI1, "\"available\": [2]", "\"available\": [2], \"bar\": 1"));
  EXPECT_NE(std::string(nested.what()).find("bar"), std::string::npos);
}

TEST(Scenario, ValidationDelegated) {
  const auto e = error_of(replace(kI1, "[[2, 1]]", "[[3, 1]]"));
  EXPECT_EQ(e.code(), Errc::ValidationError);
  EXPECT_NE(std::string(e.what()).find("DemandExceedsCap"), std::string::npos);
}

TEST(Scenario, SyntaxAndTypeErrors) {
  const auto e = error_of(replace(kI1, "\"K\": 1,", "\"K\": 1,,"));
  EXPECT_EQ(e.code(), Errc::ParseError);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  const auto t = error_of(replace(kI1, "\"c_max\": 2", "\"c_max\": 2.5"));
  EXPECT_NE(std::string(t.what()).find("c_max"), std::string::npos);
  const auto ids = error_of(replace(kI1, R"("probs": [1.0]})", R"("mode2": 1})"));
  EXPECT_EQ(ids.code(), Errc::ParseError);
}

TEST(Scenario, RoundTrip) {
  std::string text = replace(kI1, R"("process_y": {"mode": "iid", "probs": [1.0]})",
                             R"("process_y": {"mode": "trace", "sequence": ["y", "y", "y"]},
  "controller": {"V": 20, "placeholder": true, "theta": [50]},
  "episode": {"horizon": 3, "seed": 7, "replications": 2})");
  const auto a = parse_scenario_text(text);
  const auto b = parse_scenario_text(serialize_scenario(a));
  EXPECT_EQ(serialize_scenario(a), serialize_scenario(b));
  EXPECT_EQ(b.process_y.mode, ProcessMode::Trace);
  EXPECT_EQ(b.process_y.trace.size(), 3u);
  EXPECT_DOUBLE_EQ(b.V, 20.0);
  EXPECT_TRUE(b.placeholder);
  EXPECT_EQ(b.theta, std::vector<double>{50.0});
  EXPECT_EQ(b.seed, 7u);
  EXPECT_EQ(b.replications, 2);
}

TEST(Scenario, FactorizedDemandAndMarkov) {
  std::string text = replace(kI1, R"({"id": "y", "F": [[2, 1]]})",
                             R"({"id": "lo", "h": [1], "F_hat": [[1, 0.5]]},
                    {"id": "hi", "h": [2], "F_hat": [[1, 0.5]]})");
  text = replace(text, R"("process_y": {"mode": "iid", "probs": [1.0]})",
                 R"("process_y": {"mode": "markov", "transition": [[0.9, 0.1], [0.2, 0.8]], "initial": "hi"})");
  const auto s = parse_scenario_text(text);
  EXPECT_EQ(s.model.demand[1].F, (std::vector<std::vector<double>>{{2.0, 1.0}}));
  EXPECT_EQ(s.process_y.initial, 1);
  EXPECT_TRUE(s.model.demand[0].factor.has_value());
  const auto bad = error_of(replace(text, "\"initial\": \"hi\"", "\"initial\": \"zz\""));
  EXPECT_NE(std::string(bad.what()).find("zz"), std::string::npos);
}

TEST(Scenario, TraceFile) {
  const std::string dir = ::testing::TempDir();
  {
    std::ofstream f(dir + "/trace.txt");
    f << "# supply demand\nx y\n\nx y\n";
  }
  const std::string text =
      replace(replace(kI1, R"("process_x": {"mode": "iid", "probs": [1.0]})",
                      R"("process_x": {"mode": "trace", "file": "trace.txt"})"),
              R"("process_y": {"mode": "iid", "probs": [1.0]})",
              R"("process_y": {"mode": "trace", "file": "trace.txt"})");
  const auto s = parse_scenario_text(text, dir);
  EXPECT_EQ(s.process_x.trace, (std::vector<int>{0, 0}));
  EXPECT_EQ(s.process_y.trace, (std::vector<int>{0, 0}));
}
