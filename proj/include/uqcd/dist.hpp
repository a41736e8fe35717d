#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uqcd/rng.hpp"

namespace uqcd {

/// Finite-support distribution over integer outcomes. Immutable once built.
class DiscreteDistribution {
 public:
  /// Validates: non-empty, strictly increasing support, probabilities
  /// non-negative and summing to 1 within 1e-12.
  static DiscreteDistribution from_table(std::vector<int> support, std::vector<double> probs);

  /// Point mass at `value`.
  static DiscreteDistribution point_mass(int value);

  const std::vector<int>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }

  double pmf(int x) const noexcept;
  /// -inf for outcomes outside the support or with zero mass.
  double log_pmf(int x) const noexcept;
  int sample(Rng& rng) const;

  friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return a.support_ == b.support_ && a.probs_ == b.probs_;
  }

 private:
  DiscreteDistribution(std::vector<int> support, std::vector<double> probs);

  std::vector<int> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

/// Binomial(trials, p) on {0, ..., trials}.
DiscreteDistribution binomial(int trials, double p);

inline double log_pmf(const DiscreteDistribution& d, int x) noexcept { return d.log_pmf(x); }
inline int sample(const DiscreteDistribution& d, Rng& rng) { return d.sample(rng); }

/// D(d1 || d2) in nats with 0 log 0 = 0. Throws DivergenceInfinite when d1
/// puts mass where d2 has none.
double kl(const DiscreteDistribution& d1, const DiscreteDistribution& d2);

}  // namespace uqcd
