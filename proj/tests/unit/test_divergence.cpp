#include <gtest/gtest.h>

#include <cmath>

#include "../support/instances.hpp"
#include "../support/oracle.hpp"
#include "uqcd/divergence.hpp"
#include "uqcd/error.hpp"

using namespace uqcd;

TEST(Divergence, IdenticalModelsVanish) {
  const MixtureModel m(instances::network({{2, 0.3, 0.3}, {1, 0.8, 0.8}}));
  EXPECT_EQ(exact_divergence(m, std::size_t{0}), 0.0);
  EXPECT_EQ(exact_divergence(m, std::size_t{1}), 0.0);
  Rng rng(1);
  const auto mc = mc_divergence(m, std::size_t{0}, 1000, rng);
  EXPECT_EQ(mc.estimate, 0.0);
  EXPECT_EQ(mc.std_error, 0.0);
}

TEST(Divergence, ExhaustiveOracleN2) {
  for (const auto& inst : {instances::kTwoTypeN2, instances::kFig1}) {
    const MixtureModel m(instances::network(inst));
    const auto table = oracle::tabulate(instances::oracle_net(inst));
    ASSERT_EQ(table.xs.size(), 121u);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(exact_divergence(m, k), oracle::i_type(table, k, 2), 1e-12);
      EXPECT_NEAR(exact_divergence(m, WeightVector::unit(2, k)), exact_divergence(m, k), 1e-12);
    }
    const WeightVector beta({0.37, 0.63});
    EXPECT_NEAR(exact_divergence(m, beta), oracle::i_beta(table, beta.values()), 1e-12);
  }
}

TEST(Divergence, FigureOneValues) {
  // Independent check of the numbers the slope tests depend on.
  const MixtureModel m(instances::network(instances::kFig1));
  const auto r = information_report(m);
  ASSERT_TRUE(r.exact);
  EXPECT_NEAR(r.per_type[0], 0.2234518522, 1e-9);
  EXPECT_NEAR(r.per_type[1], 1.0089558318, 1e-9);
  EXPECT_EQ(r.argmin_type, 0u);
  EXPECT_EQ(r.i_star, r.per_type[0]);
}

TEST(Divergence, FourTypeOracleN4) {
  const MixtureModel m(instances::network(instances::kFourTypeN4));
  const auto table = oracle::tabulate(instances::oracle_net(instances::kFourTypeN4));
  ASSERT_EQ(table.xs.size(), 14641u);
  const auto r = information_report(m);
  ASSERT_TRUE(r.exact);
  ASSERT_EQ(r.per_type.size(), 4u);
  double best = INFINITY;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double ref = oracle::i_type(table, k, 4);
    EXPECT_NEAR(r.per_type[k], ref, 1e-12);
    if (ref < best) {
      best = ref;
      arg = k;
    }
  }
  EXPECT_EQ(r.argmin_type, arg);
  EXPECT_NEAR(r.i_star, best, 1e-12);
}

TEST(Divergence, TwoTypeN4Oracle) {
  const MixtureModel m(instances::network(instances::kTwoTypeN4));
  const auto table = oracle::tabulate(instances::oracle_net(instances::kTwoTypeN4));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(exact_divergence(m, k), oracle::i_type(table, k, 2), 1e-12);
}

TEST(Divergence, SingleTypeAndSymmetry) {
  const MixtureModel one(instances::network({{3, 0.3, 0.5}}));
  const auto r1 = information_report(one);
  ASSERT_EQ(r1.per_type.size(), 1u);
  EXPECT_EQ(r1.i_star, r1.per_type[0]);
  EXPECT_GT(r1.i_star, 0.0);

  const MixtureModel sym(instances::network({{1, 0.3, 0.5}, {1, 0.3, 0.5}}));
  const auto r2 = information_report(sym);
  EXPECT_NEAR(r2.per_type[0], r2.per_type[1], 1e-12);
  EXPECT_EQ(r2.argmin_type, 0u);
}

TEST(Divergence, MonteCarloAgreesWithExact) {
  const MixtureModel m(instances::network(instances::kTwoTypeN2));
  for (std::size_t k = 0; k < 2; ++k) {
    Rng rng(100 + k);
    const auto mc = mc_divergence(m, k, 100000, rng);
    EXPECT_NEAR(mc.estimate, exact_divergence(m, k), 4 * mc.std_error);
  }
  Rng rng(7);
  const WeightVector beta({0.4, 0.6});
  const auto mc = mc_divergence(m, beta, 100000, rng);
  EXPECT_NEAR(mc.estimate, exact_divergence(m, beta), 4 * mc.std_error);
  EXPECT_THROW(mc_divergence(m, beta, 99, rng), ContractError);
}

TEST(Divergence, MonteCarloErrorScaling) {
  const MixtureModel m(instances::network(instances::kFig1));
  double prev = 0.0;
  for (std::size_t reps : {1000u, 10000u, 100000u}) {
    Rng rng(11);
    const auto mc = mc_divergence(m, std::size_t{0}, reps, rng);
    if (prev > 0.0) {
      const double ratio = prev / mc.std_error;
      EXPECT_GT(ratio, std::sqrt(10.0) / 1.5);
      EXPECT_LT(ratio, std::sqrt(10.0) * 1.5);
    }
    prev = mc.std_error;
  }
}

TEST(Divergence, ConvexAlongSegments) {
  const MixtureModel m(instances::network(instances::kFourTypeN4));
  const auto basis = ExpectationBasis::exact(m);
  Rng rng(31);
  auto random_beta = [&] {
    std::vector<double> b(4);
    double s = 0;
    for (auto& v : b) s += (v = rng.uniform());
    for (auto& v : b) v /= s;
    return WeightVector(b);
  };
  for (int t = 0; t < 20; ++t) {
    const auto b1 = random_beta(), b2 = random_beta();
    const double lam = rng.uniform();
    std::vector<double> mid(4);
    for (std::size_t k = 0; k < 4; ++k) mid[k] = lam * b1[k] + (1 - lam) * b2[k];
    double s = 0;
    for (double v : mid) s += v;
    for (auto& v : mid) v /= s;
    EXPECT_LE(basis.i_beta(WeightVector(mid)), lam * basis.i_beta(b1) + (1 - lam) * basis.i_beta(b2) + 1e-10);
  }
}

TEST(Divergence, PreChangeDriftIdentity) {
  for (const auto& inst : {instances::kTwoTypeN2, instances::kFig1, instances::kTwoTypeN4}) {
    const MixtureModel m(instances::network(inst));
    const auto basis = ExpectationBasis::exact(m);
    const auto table = oracle::tabulate(instances::oracle_net(inst));
    for (double b : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      const std::vector<double> beta{b, 1 - b};
      const double drift = basis.weighted_drift(0, WeightVector(beta));
      EXPECT_NEAR(drift, -oracle::reverse_divergence(table, beta), 1e-10);
      EXPECT_LE(drift, 0.0);
    }
  }
}

TEST(Divergence, ExactBasisMatchesOrderedSums) {
  const MixtureModel m(instances::network(instances::kTwoTypeN4));
  const auto basis = ExpectationBasis::exact(m);
  const auto table = oracle::tabulate(instances::oracle_net(instances::kTwoTypeN4));
  const std::vector<double> beta{0.3, 0.7};
  for (std::size_t law = 0; law <= 2; ++law) {
    EXPECT_NEAR(basis.weighted_drift(law, WeightVector(beta)), oracle::drift(table, law, beta), 1e-12);
  }
}

TEST(Divergence, NonNegativeAndZeroOnlyForEqualMixtures) {
  const MixtureModel m(instances::network(instances::kFig1));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_GT(exact_divergence(m, k), 0.0);
  // Post equals pre for type 2 only: I_2 vanishes, I_1 does not.
  const MixtureModel half(instances::network({{1, 0.3, 0.4}, {1, 0.8, 0.8}}));
  EXPECT_EQ(exact_divergence(half, std::size_t{1}), 0.0);
  EXPECT_GT(exact_divergence(half, std::size_t{0}), 0.0);
}

TEST(Divergence, SupportGuardAndFallback) {
  const MixtureModel m(instances::network(instances::kTwoTypeN4));
  EXPECT_EQ(ExpectationBasis::product_support_size(m), 14641u);
  try {
    exact_divergence(m, std::size_t{0}, 1000);
    FAIL() << "expected SupportGuardExceeded";
  } catch (const SupportGuardExceeded& e) {
    EXPECT_EQ(e.size(), 14641u);
  }
  const auto r = information_report(m, 1000, 20000, 3);
  EXPECT_FALSE(r.exact);
  ASSERT_EQ(r.mc_stderr.size(), 2u);
  EXPECT_EQ(r.mc_reps, 20000u);
  const auto exact = information_report(m);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(r.per_type[k], exact.per_type[k], 4 * r.mc_stderr[k]);
}
