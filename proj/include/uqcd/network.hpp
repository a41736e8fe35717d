#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uqcd/dist.hpp"
#include "uqcd/rng.hpp"

namespace uqcd {

/// Affected sensor type for one time step; nullopt means no anomaly.
using Affected = std::optional<std::size_t>;
inline constexpr Affected kNoAnomaly = std::nullopt;

/// One sensor type: how many sensors it has and its pre/post-change laws.
struct SensorType {
  std::size_t count = 1;
  DiscreteDistribution pre;
  DiscreteDistribution post;
};

/// K sensor types with n_k sensors each. Group indexing follows the 2K
/// convention: groups 0..K-1 are unaffected types, K..2K-1 affected types.
class NetworkSpec {
 public:
  explicit NetworkSpec(std::vector<SensorType> types);

  std::size_t types() const noexcept { return types_.size(); }
  std::size_t sensors() const noexcept { return sensors_; }
  const SensorType& type(std::size_t k) const { return types_.at(k); }
  const std::vector<SensorType>& all_types() const noexcept { return types_; }

  /// Distribution generating samples of group g (0 <= g < 2K).
  const DiscreteDistribution& group_distribution(std::size_t g) const;

  /// Sorted union of all 2K supports.
  const std::vector<int>& outcomes() const noexcept { return outcomes_; }

  /// True when some outcome with mass under one of the 2K laws has zero
  /// mass under some pre-change law, so log-ratios can be infinite.
  bool ratio_unbounded() const noexcept { return ratio_unbounded_; }

  /// Per-group occupancy (length 2K) under hypothesis `affected`.
  std::vector<std::size_t> group_counts(Affected affected) const;

  /// Draws one observation: a sample per sensor from its group law, then a
  /// uniformly random permutation of the entries.
  void sample_observation(Affected affected, Rng& rng, std::span<int> out) const;
  std::vector<int> sample_observation(Affected affected, Rng& rng) const;

 private:
  std::vector<SensorType> types_;
  std::size_t sensors_ = 0;
  std::vector<int> outcomes_;
  bool ratio_unbounded_ = false;
  // Group of each slot under each hypothesis (row 0: no anomaly, row k+1:
  // type k affected), so sampling needs no allocation.
  std::vector<std::size_t> slot_groups_;
};

}  // namespace uqcd
