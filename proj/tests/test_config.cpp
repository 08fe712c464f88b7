#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rbstc/config.hpp"
#include "rbstc/report.hpp"

using namespace rbstc;
using nlohmann::json;

namespace {

json example1(int r = 5) {
  json j = json::parse(R"({
    "system": {"A": [[0,1,0],[0,0,1],[-6,7,0]], "B": [[0],[0],[1]], "K": [[0,-18,-6]]},
    "trigger": {"type": "relative", "sigma": 0.12853866, "horizon": 0.6},
    "partition": {"mode": "tau-slices", "r": 5, "tau_min": 0.0088, "tau_max": 0.2655},
    "seed": 1})");
  j["partition"]["r"] = r;
  return j;
}

std::string field_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST(Config, ParsesExampleOne) {
  auto cfg = parse_config(example1());
  EXPECT_EQ(cfg.A.rows(), 3);
  ASSERT_TRUE(cfg.K.has_value());
  EXPECT_EQ((*cfg.K)(0, 1), -18);
  ASSERT_TRUE(cfg.trigger.has_value());
  EXPECT_EQ(cfg.partition.r, 5);
  EXPECT_EQ(cfg.seed, 1u);
}

TEST(Config, NamesOffendingField) {
  auto j = example1();
  j["system"]["bogus"] = 1;
  EXPECT_EQ(field_of(j), "/system/bogus");

  j = example1();
  j["system"]["desired_poles"] = {-1, -2, -3};
  EXPECT_EQ(field_of(j), "/system");

  j = example1();
  j.erase("trigger");
  EXPECT_EQ(field_of(j), "/trigger");

  j = example1();
  j["trigger"]["sigma"] = -1;
  EXPECT_EQ(field_of(j), "/trigger/sigma");

  j = example1();
  j["partition"]["mode"] = "hexagons";
  EXPECT_EQ(field_of(j), "/partition/mode");
}

TEST(Config, PolesAndFlatB) {
  auto j = json::parse(R"({
    "system": {"A": [[0,1],[2,1]], "B": [0,1], "desired_poles": [[-1, 1], [-1, -1]]},
    "partition": {"mode": "cones", "centers": [[1,0],[0,1]], "taus": [0.1, 0.2]}})");
  auto cfg = parse_config(j);
  EXPECT_EQ(cfg.B.rows(), 2);
  EXPECT_EQ(cfg.B.cols(), 1);
  ASSERT_EQ(cfg.desired_poles.size(), 2u);
  EXPECT_EQ(cfg.desired_poles[0], Complex(-1, 1));
  auto model = build_model(cfg);
  EXPECT_TRUE(model.system.closed_loop_hurwitz());
  EXPECT_EQ(model.part().size(), 2);
  EXPECT_EQ(model.gs.size(), 2u);
}

TEST(Config, RandomConesAreSeeded) {
  auto j = json::parse(R"({
    "system": {"A": [[0,1],[2,1]], "B": [[0],[1]], "K": [[-4,-3]]},
    "partition": {"mode": "cones", "random": {"count": 12, "tau_lo": 0.03, "tau_hi": 0.23}},
    "seed": 9})");
  auto a = build_model(parse_config(j));
  auto b = build_model(parse_config(j));
  EXPECT_EQ(a.part().taus(), b.part().taus());
  EXPECT_TRUE(a.part().taus_increasing());
  for (double t : a.part().taus()) {
    EXPECT_GE(t, 0.03);
    EXPECT_LE(t, 0.23);
  }
}

TEST(Report, DumpFormatting) {
  ordered_json j;
  j["b"] = 0.1;
  j["a"] = std::numeric_limits<double>::infinity();
  j["c"] = std::vector<double>{1.0, 2.5};
  const std::string s = dump_json(j);
  EXPECT_LT(s.find("\"b\""), s.find("\"a\""));
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("null"), std::string::npos);
  EXPECT_EQ(json::parse(s)["c"][1].get<double>(), 2.5);
}

TEST(Report, SingleRegionReportsDominantPir) {
  auto run = run_analysis(parse_config(example1(1)));
  const auto& rep = run.report;
  ASSERT_EQ(rep["regions"].size(), 1u);
  int rays = 0;
  for (const auto& c : rep["regions"][0]["candidates"])
    if (c["kind"] == "ray" && c["verified"] == true) ++rays;
  // whole sphere: both directions of every positive eigenvector
  EXPECT_GE(rays, 2);
  EXPECT_TRUE(run.a1_passed);
}

TEST(Report, Deterministic) {
  auto cfg = parse_config(example1());
  EXPECT_EQ(dump_json(run_analysis(cfg).report), dump_json(run_analysis(cfg).report));
}
