#include "uqcd/dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

namespace {
constexpr double kNormTolerance = 1e-12;
}

DiscreteDistribution::DiscreteDistribution(std::vector<int> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cdf_[i] = acc;
    if (probs_[i] > 0.0) last_positive_ = i;
  }
}

DiscreteDistribution DiscreteDistribution::from_table(std::vector<int> support,
                                                      std::vector<double> probs) {
  if (support.empty()) throw ParameterError("distribution support is empty");
  if (support.size() != probs.size()) {
    throw ParameterError("support has " + std::to_string(support.size()) + " entries but probs has " +
                         std::to_string(probs.size()));
  }
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (support[i] <= support[i - 1]) {
      throw ParameterError("support must be strictly increasing (entry " + std::to_string(i) + ")");
    }
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw ParameterError("probability " + std::to_string(i) + " is negative or not finite");
    }
    total.add(probs[i]);
  }
  if (std::abs(total.value() - 1.0) > kNormTolerance) {
    throw ParameterError("probabilities sum to " + std::to_string(total.value()) + ", not 1");
  }
  return DiscreteDistribution(std::move(support), std::move(probs));
}

DiscreteDistribution DiscreteDistribution::point_mass(int value) {
  return DiscreteDistribution({value}, {1.0});
}

double DiscreteDistribution::pmf(int x) const noexcept {
  const auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x) return 0.0;
  return probs_[static_cast<std::size_t>(it - support_.begin())];
}

double DiscreteDistribution::log_pmf(int x) const noexcept {
  const double p = pmf(x);
  return p > 0.0 ? std::log(p) : kNegInf;
}

int DiscreteDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  // First index whose cumulative mass exceeds u; zero-mass entries never
  // qualify because their cdf equals their predecessor's.
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
  if (idx > last_positive_) idx = last_positive_;
  return support_[idx];
}

DiscreteDistribution binomial(int trials, double p) {
  if (trials < 1) throw ParameterError("binomial trials must be >= 1, got " + std::to_string(trials));
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial p must lie in [0, 1], got " + std::to_string(p));
  std::vector<int> support(static_cast<std::size_t>(trials) + 1);
  std::vector<double> probs(support.size(), 0.0);
  for (int k = 0; k <= trials; ++k) support[static_cast<std::size_t>(k)] = k;
  if (p == 0.0) {
    probs.front() = 1.0;
  } else if (p == 1.0) {
    probs.back() = 1.0;
  } else {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lg_n = std::lgamma(trials + 1.0);
    // Binomial coefficients stay exact in double up to 56 trials.
    const bool exact_choose = trials <= 56;
    double choose = 1.0;
    for (int k = 0; k <= trials; ++k) {
      if (exact_choose) {
        probs[static_cast<std::size_t>(k)] = choose * std::pow(p, k) * std::pow(1.0 - p, trials - k);
        choose = choose * (trials - k) / (k + 1);
      } else {
        const double log_choose = lg_n - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
        probs[static_cast<std::size_t>(k)] = std::exp(log_choose + k * lp + (trials - k) * lq);
      }
    }
  }
  return DiscreteDistribution::from_table(std::move(support), std::move(probs));
}

double kl(const DiscreteDistribution& d1, const DiscreteDistribution& d2) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double p = d1.probs()[i];
    if (p == 0.0) continue;
    const int x = d1.support()[i];
    const double q = d2.pmf(x);
    if (q == 0.0) throw DivergenceInfinite(x);
    acc.add(p * (std::log(p) - std::log(q)));
  }
  return std::max(0.0, acc.value());
}

}  // namespace uqcd
