#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "../support/instances.hpp"
#include "../support/oracle.hpp"
#include "../support/stats.hpp"
#include "uqcd/error.hpp"
#include "uqcd/sim.hpp"
#include "uqcd/weights.hpp"

using namespace uqcd;

namespace {

DetectorConfig gm(double b) { return {Algorithm::gm, std::nullopt, b, "gm"}; }

bool same(const RunLengthEstimate& a, const RunLengthEstimate& b) {
  return a.mean == b.mean && a.std_error == b.std_error && a.censored == b.censored && a.reps == b.reps;
}

// K = 1, n = 1: the post-change law sits on an outcome whose ratio is ln 2.
NetworkSpec sure_jump() {
  return NetworkSpec({{1, DiscreteDistribution::from_table({0, 1}, {0.5, 0.5}),
                       DiscreteDistribution::from_table({0, 1}, {0.0, 1.0})}});
}

}  // namespace

TEST(Trajectory, ValidationAndSteps) {
  Rng rng(1);
  EXPECT_THROW(Trajectory::static_type(2).validate(2), ParameterError);
  EXPECT_THROW(Trajectory::iid({0.5, 0.6}).validate(2), ParameterError);
  EXPECT_THROW(Trajectory::iid({1.0}).validate(2), ParameterError);
  EXPECT_THROW(Trajectory::explicit_sequence({}), ParameterError);
  EXPECT_THROW(Trajectory::explicit_sequence({Affected(3)}).validate(2), ParameterError);

  EXPECT_EQ(Trajectory::none().at(5, rng), kNoAnomaly);
  EXPECT_EQ(Trajectory::static_type(1).at(5, rng), Affected(1));
  const auto seq = Trajectory::explicit_sequence({Affected(0), kNoAnomaly, Affected(1)});
  EXPECT_EQ(seq.at(1, rng), Affected(0));
  EXPECT_EQ(seq.at(2, rng), kNoAnomaly);
  EXPECT_EQ(seq.at(3, rng), Affected(1));
  EXPECT_EQ(seq.at(50, rng), Affected(1));
  const auto unit = Trajectory::iid({0.0, 1.0});
  for (int t = 1; t < 100; ++t) EXPECT_EQ(unit.at(t, rng), Affected(1));
  EXPECT_EQ(Trajectory::static_type(0).describe(), "static(1)");
  EXPECT_EQ(Trajectory::iid({0.8, 0.2}).describe(), "iid(0.8,0.2)");
}

TEST(Trajectory, IidFrequencies) {
  Rng rng(3);
  const auto t = Trajectory::iid({0.8, 0.2});
  int ones = 0;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ones += *t.at(i + 1, rng) == 0;
  EXPECT_NEAR(ones / double(draws), 0.8, 3 * std::sqrt(0.16 / draws));
}

TEST(Observation, SingleSensorAndIdenticalModels) {
  const auto net = instances::network({{1, 0.3, 0.4}});
  Rng rng(2);
  const auto x = generate_observation(net, Affected(0), rng);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_GE(x[0], 0);
  EXPECT_LE(x[0], 10);

  // With post = pre every hypothesis generates the same values.
  const auto same_net = instances::network({{2, 0.3, 0.3}, {1, 0.6, 0.6}});
  Rng a(9), b(9);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(generate_observation(same_net, kNoAnomaly, a), generate_observation(same_net, Affected(1), b));
  }
}

TEST(Observation, JointFrequenciesMatchMixture) {
  const auto ref = oracle::tabulate(instances::oracle_net(instances::kFig1));
  const auto net = instances::network(instances::kFig1);
  std::map<std::vector<int>, std::size_t> index;
  std::vector<double> probs;
  for (std::size_t i = 0; i < ref.xs.size(); ++i) {
    index[ref.xs[i]] = i;
    probs.push_back(ref.probs[i][0]);
  }
  Rng rng(2718);
  const int draws = 100000;
  std::vector<double> counts(probs.size(), 0.0);
  for (int i = 0; i < draws; ++i) counts[index.at(generate_observation(net, kNoAnomaly, rng))] += 1;
  const auto chi = teststats::chi_square(counts, probs, draws, 1e-3);
  EXPECT_LT(chi.statistic, chi.critical);
  EXPECT_GT(chi.cells, 30u);
}

TEST(Estimate, ImmediateStop) {
  const MixtureModel m(sure_jump());
  const Simulator sim(m);
  const auto add = sim.estimate_add(gm(1e-9), Trajectory::static_type(0), 200, 1);
  EXPECT_EQ(add.mean, 1.0);
  EXPECT_EQ(add.std_error, 0.0);
  EXPECT_EQ(add.censored, 0u);
}

TEST(Estimate, IdenticalModelsCensorEverything) {
  const MixtureModel m(instances::network({{1, 0.3, 0.3}, {1, 0.7, 0.7}}));
  SimOptions opts;
  opts.cap = 500;
  const Simulator sim(m, opts);
  const auto arl = sim.estimate_arl(gm(1.0), 50, 4);
  EXPECT_EQ(arl.censored, 50u);
  EXPECT_EQ(arl.mean, 500.0);
  const auto add = sim.estimate_add({Algorithm::bayes_uniform, std::nullopt, 1.0, ""}, Trajectory::static_type(0), 50, 4);
  EXPECT_EQ(add.censored, 50u);
}

TEST(Estimate, ReproducibleAndThreadIndependent) {
  const MixtureModel m(instances::network(instances::kFig1));
  SimOptions one, three;
  three.threads = 3;
  const Simulator a(m, one), b(m, three);
  const auto traj = Trajectory::iid({0.8, 0.2});
  const DetectorConfig w{Algorithm::weighted, WeightVector({0.9, 0.1}), 5.0, "w"};
  EXPECT_TRUE(same(a.estimate_add(w, traj, 300, 42), a.estimate_add(w, traj, 300, 42)));
  EXPECT_TRUE(same(a.estimate_add(w, traj, 300, 42), b.estimate_add(w, traj, 300, 42)));
  EXPECT_TRUE(same(a.estimate_arl(gm(4.0), 300, 42), b.estimate_arl(gm(4.0), 300, 42)));
  EXPECT_FALSE(same(a.estimate_arl(gm(4.0), 300, 42), a.estimate_arl(gm(4.0), 300, 43)));
}

TEST(Estimate, TableAndDirectPathsAgreeBitwise) {
  const MixtureModel m(instances::network(instances::kTwoTypeN4));
  SimOptions direct;
  direct.table_limit = 0;
  const Simulator fast(m), slow(m, direct);
  ASSERT_TRUE(fast.uses_table());
  ASSERT_FALSE(slow.uses_table());
  const auto traj = Trajectory::iid({0.3, 0.7});
  for (const auto& det : {gm(4.0), DetectorConfig{Algorithm::weighted, WeightVector({0.2, 0.8}), 4.0, ""},
                          DetectorConfig{Algorithm::bayes_uniform, std::nullopt, 4.0, ""}}) {
    EXPECT_TRUE(same(fast.estimate_add(det, traj, 100, 8), slow.estimate_add(det, traj, 100, 8)));
    EXPECT_TRUE(same(fast.estimate_arl(det, 50, 8), slow.estimate_arl(det, 50, 8)));
  }
}

TEST(Estimate, StaticEqualsUnitIid) {
  const MixtureModel m(instances::network(instances::kFig1));
  const Simulator sim(m);
  const auto a = sim.estimate_add(gm(6.0), Trajectory::static_type(1), 3000, 1);
  const auto b = sim.estimate_add(gm(6.0), Trajectory::iid({0.0, 1.0}), 3000, 2);
  EXPECT_NEAR(a.mean, b.mean, 3 * teststats::combined_se(a.std_error, b.std_error));
}

TEST(OperatingCharacteristic, ComposesBitwise) {
  const MixtureModel m(instances::network(instances::kFig1));
  const Simulator sim(m);
  const auto traj = Trajectory::static_type(0);
  const std::vector<DetectorConfig> dets{gm(3.0)};
  const std::vector<double> b{3.0};
  const auto rows = sim.operating_characteristic(dets, traj, b, 200, 77);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(same(rows[0].add, sim.estimate_add(gm(3.0), traj, 200, oc_seed(77, 0))));
  EXPECT_TRUE(same(rows[0].arl, sim.estimate_arl(gm(3.0), 200, oc_seed(77, 0))));
  EXPECT_EQ(rows[0].detector, "gm");
  EXPECT_EQ(rows[0].threshold, 3.0);

  const std::vector<double> bad{3.0, 2.0};
  EXPECT_THROW(sim.operating_characteristic(dets, traj, bad, 10, 1), ParameterError);
}

TEST(OperatingCharacteristic, MonotoneInThreshold) {
  const MixtureModel m(instances::network(instances::kFig1));
  const Simulator sim(m);
  const std::vector<DetectorConfig> dets{gm(1.0), {Algorithm::bayes_uniform, std::nullopt, 1.0, "tb"}};
  const std::vector<double> b{1.0, 2.0, 3.0, 4.0};
  const auto rows = sim.operating_characteristic(dets, Trajectory::static_type(0), b, 1000, 5);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].detector != rows[i - 1].detector) continue;
    EXPECT_GE(rows[i].add.mean, rows[i - 1].add.mean - 2 * teststats::combined_se(rows[i].add.std_error, rows[i - 1].add.std_error));
    EXPECT_GE(rows[i].arl.mean, rows[i - 1].arl.mean - 2 * teststats::combined_se(rows[i].arl.std_error, rows[i - 1].arl.std_error));
  }
}

TEST(OperatingCharacteristic, ProxyTakesTheWorstTrajectory) {
  const MixtureModel m(instances::network(instances::kFig1));
  const Simulator sim(m);
  const std::vector<Trajectory> set{Trajectory::static_type(1), Trajectory::static_type(0)};
  const auto proxy = sim.estimate_wadd_proxy(gm(4.0), set, 500, 3);
  ASSERT_EQ(proxy.per_trajectory.size(), 2u);
  // Type 1 carries far less information, so its delay is the worst.
  EXPECT_EQ(proxy.worst_trajectory, 1u);
  EXPECT_TRUE(same(proxy.add, proxy.per_trajectory[1]));
  EXPECT_TRUE(same(proxy.per_trajectory[0], sim.estimate_add(gm(4.0), set[0], 500, 3)));
}

TEST(EvolutionPath, PreChangeOnlyAndCrossing) {
  const MixtureModel m(instances::network(instances::kFig1));
  const Simulator sim(m);
  const auto pre = sim.evolution_path(gm(20.0), Trajectory::static_type(0), 2000, 1000, 9);
  ASSERT_EQ(pre.statistic.size(), 1000u);
  EXPECT_FALSE(pre.first_crossing.has_value());
  const auto post = sim.evolution_path(gm(20.0), Trajectory::static_type(0), 300, 1000, 9);
  ASSERT_TRUE(post.first_crossing.has_value());
  EXPECT_GT(*post.first_crossing, 300u);
  EXPECT_GE(post.statistic[*post.first_crossing - 1], 20.0);
  // Same seed, same path.
  const auto again = sim.evolution_path(gm(20.0), Trajectory::static_type(0), 300, 1000, 9);
  EXPECT_EQ(post.statistic, again.statistic);
}

TEST(Curves, LineFitAndInterpolation) {
  std::vector<OcRow> rows;
  for (double b : {2.0, 4.0, 6.0}) {
    OcRow r;
    r.threshold = b;
    r.arl.mean = std::exp(b);
    r.add.mean = 3.0 + 2.0 * b;
    r.add.std_error = 0.1;
    rows.push_back(r);
  }
  const auto fit = fit_add_vs_log_arl(rows);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 3.0, 1e-12);
  const auto mid = add_at_arl(rows, std::exp(3.0));
  ASSERT_TRUE(mid.has_value());
  EXPECT_NEAR(mid->mean, 9.0, 1e-12);
  EXPECT_NEAR(mid->std_error, std::hypot(0.05, 0.05), 1e-12);
  EXPECT_FALSE(add_at_arl(rows, 1.0).has_value());
  EXPECT_FALSE(add_at_arl(rows, 1e6).has_value());
}

TEST(Seeds, SplitIsDeterministicAndDistinct) {
  EXPECT_EQ(split_seed(1, 0), split_seed(1, 0));
  EXPECT_NE(split_seed(1, 0), split_seed(1, 1));
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
}
