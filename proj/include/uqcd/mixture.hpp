#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqcd/labels.hpp"
#include "uqcd/network.hpp"
#include "uqcd/simplex.hpp"

namespace uqcd {

/// Work counters for one DP evaluation.
struct DpStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
};

/// Anything that yields the K+1 mixture log-likelihoods of an observation:
/// out[0] = log P~_0(x) and out[k+1] = log P~^k(x).
class LikelihoodSource {
 public:
  virtual ~LikelihoodSource() = default;
  virtual std::size_t types() const noexcept = 0;
  virtual std::size_t sensors() const noexcept = 0;
  virtual void log_likelihoods(std::span<const int> x, std::span<double> out) const = 0;
};

/// Uniform-mixture likelihoods over all label assignments, evaluated by a
/// dynamic program over remaining group capacities. Groups whose laws are
/// identical are merged first, which leaves the mixture unchanged and makes
/// hypotheses with identical laws evaluate bitwise-identically.
///
/// Immutable after construction; evaluation is safe from any thread.
class MixtureModel final : public LikelihoodSource {
 public:
  /// Throws RatioUnbounded when the network admits infinite log-ratios.
  explicit MixtureModel(NetworkSpec net);

  const NetworkSpec& network() const noexcept { return net_; }
  std::size_t types() const noexcept override { return net_.types(); }
  std::size_t sensors() const noexcept override { return net_.sensors(); }

  /// log P~(x) under `affected`; -inf when every assignment has zero mass.
  /// The observation is sorted before evaluation, so the result is
  /// bitwise invariant under permutations of x.
  double log_likelihood(Affected affected, std::span<const int> x, DpStats* stats = nullptr) const;

  void log_likelihoods(std::span<const int> x, std::span<double> out) const override;

  /// Same as log_likelihoods but on non-decreasing outcome indices.
  void log_likelihoods_sorted(std::span<const std::size_t> sorted_idx, std::span<double> out) const;

  /// Position of x in network().outcomes(), or npos.
  std::size_t outcome_index(int x) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Number of DP states for a hypothesis (product of merged capacities + 1).
  std::uint64_t state_count(Affected affected) const;

 private:
  struct Config {
    std::vector<std::size_t> law;       // distinct-law id per merged group
    std::vector<std::size_t> capacity;  // samples per merged group
    std::vector<std::size_t> stride;    // mixed-radix stride per group
    std::size_t states = 1;
    double log_label_count = 0.0;
  };

  const Config& config(Affected affected) const;
  double run_dp(const Config& cfg, std::span<const std::size_t> sorted_idx, DpStats* stats) const;

  NetworkSpec net_;
  std::vector<std::vector<double>> log_pmf_;  // [law][outcome index]
  std::vector<Config> configs_;               // [0] no anomaly, [k+1] type k
  int first_outcome_ = 0;
  bool contiguous_ = false;
};

/// Precomputed log-likelihood rows for every multiset of outcomes, ranked
/// in the combinatorial number system. Lookups return the same bits as the
/// model they were built from.
class LikelihoodTable final : public LikelihoodSource {
 public:
  static constexpr std::uint64_t kDefaultMaxEntries = 4'000'000;

  explicit LikelihoodTable(const MixtureModel& m, std::uint64_t max_entries = kDefaultMaxEntries);

  /// Number of multisets C(|outcomes| + n - 1, n), saturating.
  static std::uint64_t entries_needed(const MixtureModel& m);

  std::size_t types() const noexcept override { return model_->types(); }
  std::size_t sensors() const noexcept override { return model_->sensors(); }
  std::uint64_t entries() const noexcept { return entries_; }

  void log_likelihoods(std::span<const int> x, std::span<double> out) const override;

  /// Entry holding the multiset of x, or kNoEntry when some value lies
  /// outside the outcome set.
  static constexpr std::uint64_t kNoEntry = static_cast<std::uint64_t>(-1);
  std::uint64_t entry_of(std::span<const int> x) const;
  /// Row (log P~_0, log P~^1, ..., log P~^K) of entry e.
  std::span<const double> row(std::uint64_t e) const noexcept {
    return {rows_.data() + e * width_, width_};
  }

 private:
  std::uint64_t rank(std::span<const std::size_t> sorted_idx) const noexcept;

  const MixtureModel* model_;
  std::uint64_t entries_ = 0;
  std::size_t width_ = 0;
  std::vector<std::vector<std::uint64_t>> choose_;  // choose_[a][b] = C(a, b)
  std::vector<double> rows_;
};

double mixture_log_likelihood(const MixtureModel& m, Affected affected, std::span<const int> x);

/// Literal definition: log-mean over every label assignment of the labeled
/// likelihood. Throws EnumerationTooLarge past `cap` labels.
double brute_force_mixture_log_likelihood(const MixtureModel& m, Affected affected,
                                          std::span<const int> x,
                                          std::uint64_t cap = kDefaultEnumerationCap);

/// log P~^k(x) - log P~_0(x).
double per_type_log_ratio(const MixtureModel& m, std::size_t k, std::span<const int> x);

/// log(sum_k beta_k P~^k(x) / P~_0(x)); zero-weight types are skipped.
double weighted_mixture_log_ratio(const MixtureModel& m, const WeightVector& beta,
                                  std::span<const int> x);

/// Per-type log-ratios from a likelihood row (out has length K).
void per_type_ratios(std::span<const double> row, std::span<double> out);

/// log(sum_k beta_k exp(r_k)) over positive-weight types.
double weighted_log_ratio(std::span<const double> ratios, const WeightVector& beta);

}  // namespace uqcd
