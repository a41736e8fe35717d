#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uqcd/mixture.hpp"
#include "uqcd/rng.hpp"
#include "uqcd/simplex.hpp"

namespace uqcd {

inline constexpr std::uint64_t kDefaultSupportGuard = 10'000'000;

/// Either one affected type k (I_k) or a weight vector beta (I_beta).
using DivergenceTarget = std::variant<std::size_t, WeightVector>;

/// Weighted point sets representing the laws P~_0, P~^1, ..., P~^K so that
/// expectations of functions of the likelihood row reduce to weighted sums.
///
/// The exact basis enumerates every multiset of outcomes once and weights it
/// by its orbit size times the law's probability; the Monte Carlo basis
/// holds `reps` fixed draws per law with weight 1/reps (common random
/// numbers, so repeated evaluations are deterministic).
class ExpectationBasis {
 public:
  static ExpectationBasis exact(const MixtureModel& m, std::uint64_t support_guard = kDefaultSupportGuard);
  static ExpectationBasis monte_carlo(const MixtureModel& m, std::size_t reps, std::uint64_t seed);

  /// Full product-support size |outcomes|^n (saturating).
  static std::uint64_t product_support_size(const MixtureModel& m);

  std::size_t types() const noexcept { return types_; }
  bool is_exact() const noexcept { return exact_; }
  std::size_t reps() const noexcept { return reps_; }

  /// E over law (0 = P~_0, k+1 = P~^k) of log(P~^beta / P~_0).
  double weighted_drift(std::size_t law, const WeightVector& beta) const;
  /// E^k[l_beta] for k = 0..K-1.
  std::vector<double> type_drifts(const WeightVector& beta) const;
  /// Standard error of E^k[l_beta] (zero for the exact basis).
  std::vector<double> type_drift_stderr(const WeightVector& beta) const;

  /// I_beta = sum_k beta_k E^k[l_beta].
  double i_beta(const WeightVector& beta) const;
  /// I_k = E^k[log P~^k / P~_0].
  double i_type(std::size_t k) const;

  /// E over law of exp(log P~^k / P~_0) (martingale normalization).
  double likelihood_ratio_mean(std::size_t law, std::size_t k) const;

 private:
  struct LawPoints {
    std::vector<double> weight;   // probability mass (exact) or 1/reps
    std::vector<double> ratios;   // row-major [point][k] per-type log-ratios
  };

  template <typename F>
  double expect(std::size_t law, F&& f) const;

  std::size_t types_ = 0;
  bool exact_ = true;
  std::size_t reps_ = 0;
  std::vector<LawPoints> laws_;  // K+1 laws
};

/// D(P~^target || P~_0) by summation over the joint support.
double exact_divergence(const MixtureModel& m, const DivergenceTarget& target,
                        std::uint64_t support_guard = kDefaultSupportGuard);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Sample mean of the target log-ratio over `reps` draws from P~^target.
McEstimate mc_divergence(const MixtureModel& m, const DivergenceTarget& target, std::size_t reps,
                         Rng& rng);

struct DivergenceReport {
  std::vector<double> per_type;  // I_k, nats
  double i_star = 0.0;
  std::size_t argmin_type = 0;   // lowest index on ties
  bool exact = true;
  std::vector<double> mc_stderr; // empty when exact
  std::size_t mc_reps = 0;
};

/// All I_k and I*. Exact when the support guard allows, else Monte Carlo.
DivergenceReport information_report(const MixtureModel& m,
                                    std::uint64_t support_guard = kDefaultSupportGuard,
                                    std::size_t mc_reps = 100'000, std::uint64_t mc_seed = 1);

}  // namespace uqcd
