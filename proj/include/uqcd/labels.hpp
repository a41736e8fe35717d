#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqcd/network.hpp"
#include "uqcd/rng.hpp"

namespace uqcd {

/// Per-group occupancy counts; sum equals the number of samples.
struct GroupCounts {
  std::vector<std::size_t> counts;

  std::size_t total() const noexcept;
};

/// assignment[i] is the group of sample i.
using LabelAssignment = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Multinomial coefficient n! / prod_g counts[g]!. Throws ContractError on
/// 64-bit overflow.
std::uint64_t label_space_size(const GroupCounts& c);

/// Streams every label assignment consistent with `c` exactly once, in
/// lexicographic order.
class LabelEnumerator {
 public:
  explicit LabelEnumerator(const GroupCounts& c, std::uint64_t cap = kDefaultEnumerationCap);

  /// Writes the next assignment into `out`; false once exhausted.
  bool next(LabelAssignment& out);

  std::uint64_t size() const noexcept { return size_; }

 private:
  LabelAssignment current_;
  std::uint64_t size_ = 0;
  bool started_ = false;
  bool done_ = false;
};

/// Convenience: materializes every assignment.
std::vector<LabelAssignment> enumerate_labels(const GroupCounts& c,
                                              std::uint64_t cap = kDefaultEnumerationCap);

/// Uniform permutation of {0, ..., n-1} (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

/// out[i] = v[perm[i]].
template <typename T>
std::vector<T> apply_permutation(std::span<const std::size_t> perm, std::span<const T> v) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[perm[i]];
  return out;
}

/// Sum over samples of log p_{group(i)}(x_i) for a fixed assignment that
/// must match the group counts of hypothesis `affected`.
double labeled_log_likelihood(const NetworkSpec& net, Affected affected, const LabelAssignment& a,
                              std::span<const int> x);

}  // namespace uqcd
