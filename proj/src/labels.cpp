#include "uqcd/labels.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "uqcd/error.hpp"

namespace uqcd {

std::size_t GroupCounts::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::uint64_t label_space_size(const GroupCounts& c) {
  // prod_g C(prefix_g, counts_g), each factor exact.
  std::uint64_t result = 1;
  std::uint64_t prefix = 0;
  for (std::size_t cnt : c.counts) {
    for (std::uint64_t i = 1; i <= cnt; ++i) {
      ++prefix;
      // After this step result = (previous groups) * C(prefix, i): exact.
      unsigned __int128 wide = static_cast<unsigned __int128>(result) * prefix;
      wide /= i;
      if (wide > UINT64_MAX) throw ContractError("label space size overflows 64 bits");
      result = static_cast<std::uint64_t>(wide);
    }
  }
  return result;
}

LabelEnumerator::LabelEnumerator(const GroupCounts& c, std::uint64_t cap) {
  size_ = label_space_size(c);
  if (size_ > cap) throw EnumerationTooLarge(size_, cap);
  for (std::size_t g = 0; g < c.counts.size(); ++g) current_.insert(current_.end(), c.counts[g], g);
}

bool LabelEnumerator::next(LabelAssignment& out) {
  if (done_) return false;
  if (started_ && !std::next_permutation(current_.begin(), current_.end())) {
    done_ = true;
    return false;
  }
  started_ = true;
  out = current_;
  return true;
}

std::vector<LabelAssignment> enumerate_labels(const GroupCounts& c, std::uint64_t cap) {
  LabelEnumerator e(c, cap);
  std::vector<LabelAssignment> out;
  out.reserve(e.size());
  LabelAssignment a;
  while (e.next(a)) out.push_back(a);
  return out;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  if (n == 0) throw ContractError("permutation length must be positive");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

double labeled_log_likelihood(const NetworkSpec& net, Affected affected, const LabelAssignment& a,
                              std::span<const int> x) {
  if (a.size() != x.size() || x.size() != net.sensors()) {
    throw ContractError("assignment/observation length does not match the network");
  }
  const auto expected = net.group_counts(affected);
  std::vector<std::size_t> seen(expected.size(), 0);
  for (std::size_t g : a) {
    if (g >= seen.size()) throw ContractError("assignment names group " + std::to_string(g));
    ++seen[g];
  }
  if (seen != expected) throw ContractError("assignment occupancy does not match the hypothesis");

  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += net.group_distribution(a[i]).log_pmf(x[i]);
  return total;
}

}  // namespace uqcd
