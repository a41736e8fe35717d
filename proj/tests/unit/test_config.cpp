#include <gtest/gtest.h>

#include "uqcd/config.hpp"
#include "uqcd/error.hpp"

using namespace uqcd;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "network": {"types": [{"count": 1, "pre": {"binomial": {"trials": 10, "p": 0.3}},
                                        "post": {"binomial": {"trials": 10, "p": 0.4}}}]},
    "detectors": [{"algorithm": "gm", "gamma": 100}]
  })");
}

json figure_one() {
  return json::parse(R"({
    "network": {"types": [
      {"count": 1, "pre": {"binomial": {"trials": 10, "p": 0.3}}, "post": {"binomial": {"trials": 10, "p": 0.4}}},
      {"count": 1, "pre": {"binomial": {"trials": 10, "p": 0.8}}, "post": {"binomial": {"trials": 10, "p": 0.6}}}
    ]},
    "detectors": [{"algorithm": "gm", "threshold": 20, "label": "GM-CuSum"},
                  {"algorithm": "weighted", "threshold": 20, "beta": "optimal"},
                  {"algorithm": "weighted", "gamma": 1000, "beta": [0.5, 0.5], "label": "half"}],
    "trajectory": {"static": 1},
    "trajectories": [{"static": 1}, {"static": 2}, {"iid": [0.8, 0.2]}, {"explicit": [0, 1, 2]}],
    "change_point": 500,
    "horizon": 1000,
    "reps": 5000,
    "seed": 7,
    "thresholds": [4, 6, 8, 10],
    "solver": {"tol": 1e-7},
    "output": "fig1.json"
  })");
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST(Config, MinimalGetsDefaults) {
  const auto cfg = parse_config(minimal());
  EXPECT_EQ(cfg.reps, 5000u);
  EXPECT_EQ(cfg.cap, 1000000u);
  EXPECT_EQ(cfg.solver.tol, 1e-6);
  EXPECT_EQ(cfg.solver.max_iters, 10000u);
  EXPECT_EQ(cfg.change_point, 1u);
  EXPECT_EQ(cfg.seed, 1u);
  ASSERT_EQ(cfg.detectors.size(), 1u);
  EXPECT_EQ(cfg.detectors[0].label, "gm");
  EXPECT_NEAR(resolve_threshold(cfg.detectors[0], cfg.network.types()), std::log(100.0), 1e-15);
  EXPECT_EQ(cfg.network.type(0).pre, binomial(10, 0.3));
  const auto j = to_json(cfg);
  EXPECT_EQ(j["reps"], 5000);
  EXPECT_EQ(j["solver"]["tol"], 1e-6);
}

TEST(Config, FieldPathsInErrors) {
  auto doc = minimal();
  doc["network"]["types"][0]["pre"] = json::parse(R"({"support": [0, 1], "probs": [0.5, 0.6]})");
  EXPECT_EQ(error_path(doc), "network.types[0].pre.probs");

  doc = minimal();
  doc["repz"] = 10;
  EXPECT_EQ(error_path(doc), "repz");

  doc = minimal();
  doc["network"]["types"][0]["post"]["binomial"]["q"] = 0.1;
  EXPECT_EQ(error_path(doc), "network.types[0].post.binomial.q");

  doc = minimal();
  doc["network"]["types"][0]["post"]["binomial"]["p"] = 1.5;
  EXPECT_EQ(error_path(doc), "network.types[0].post.binomial.p");

  doc = minimal();
  doc["detectors"][0]["threshold"] = 3;
  EXPECT_EQ(error_path(doc), "detectors[0]");

  doc = minimal();
  doc["detectors"][0]["beta"] = json::array({1.0});
  EXPECT_EQ(error_path(doc), "detectors[0].beta");

  doc = minimal();
  doc["detectors"][0]["algorithm"] = "cusum";
  EXPECT_EQ(error_path(doc), "detectors[0].algorithm");

  doc = minimal();
  doc["detectors"][0]["gamma"] = 1.0;
  EXPECT_EQ(error_path(doc), "detectors[0].gamma");

  doc = minimal();
  doc["trajectory"] = json{{"static", 2}};
  EXPECT_EQ(error_path(doc), "trajectory");

  doc = minimal();
  doc["thresholds"] = json::array({4, 3});
  EXPECT_EQ(error_path(doc), "thresholds");

  doc = minimal();
  doc["solver"] = json{{"tolerance", 1e-3}};
  EXPECT_EQ(error_path(doc), "solver.tolerance");

  doc = minimal();
  doc["network"]["types"][0]["count"] = 0;
  EXPECT_EQ(error_path(doc), "network.types[0].count");

  EXPECT_THROW(parse_config(std::string("{ not json")), ConfigError);
  EXPECT_THROW(parse_config(std::string("[]")), ConfigError);
}

TEST(Config, FigureOneRoundTrips) {
  const auto cfg = parse_config(figure_one().dump());
  EXPECT_EQ(cfg.network.types(), 2u);
  EXPECT_EQ(cfg.change_point, 500u);
  EXPECT_EQ(cfg.seed, 7u);
  ASSERT_EQ(cfg.trajectories.size(), 4u);
  EXPECT_EQ(cfg.trajectories[3].sequence()[0], kNoAnomaly);
  EXPECT_EQ(cfg.trajectories[3].sequence()[2], Affected(1));
  EXPECT_TRUE(cfg.detectors[1].optimal_beta);
  ASSERT_TRUE(cfg.detectors[2].beta.has_value());
  EXPECT_NEAR(resolve_threshold(cfg.detectors[2], 2), std::log(1000.0), 1e-15);

  const json once = to_json(cfg);
  const json twice = to_json(parse_config(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once.dump(), twice.dump());
  EXPECT_EQ(once["trajectory"], json({{"static", 1}}));
  EXPECT_EQ(once["output"], "fig1.json");
}

TEST(Config, TableDistributionsAndNone) {
  auto doc = minimal();
  doc["network"]["types"][0]["pre"] = json::parse(R"({"support": [0, 1, 2], "probs": [0.2, 0.3, 0.5]})");
  doc["network"]["types"][0]["post"] = json::parse(R"({"support": [0, 1, 2], "probs": [0.1, 0.3, 0.6]})");
  doc["trajectory"] = "none";
  const auto cfg = parse_config(doc);
  EXPECT_EQ(cfg.network.type(0).pre.pmf(2), 0.5);
  EXPECT_EQ(cfg.trajectory->kind(), Trajectory::Kind::none);
  EXPECT_EQ(to_json(parse_config(to_json(cfg))), to_json(cfg));
}
