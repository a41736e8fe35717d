#include "uqcd/network.hpp"

#include <algorithm>
#include <string>

#include "uqcd/error.hpp"

namespace uqcd {

NetworkSpec::NetworkSpec(std::vector<SensorType> types) : types_(std::move(types)) {
  if (types_.empty()) throw ParameterError("network needs at least one sensor type");
  for (std::size_t k = 0; k < types_.size(); ++k) {
    if (types_[k].count < 1) {
      throw ParameterError("sensor type " + std::to_string(k + 1) + " has no sensors");
    }
    sensors_ += types_[k].count;
  }

  for (std::size_t g = 0; g < 2 * types_.size(); ++g) {
    const auto& d = group_distribution(g);
    outcomes_.insert(outcomes_.end(), d.support().begin(), d.support().end());
  }
  std::sort(outcomes_.begin(), outcomes_.end());
  outcomes_.erase(std::unique(outcomes_.begin(), outcomes_.end()), outcomes_.end());

  slot_groups_.reserve((types_.size() + 1) * sensors_);
  for (std::size_t h = 0; h <= types_.size(); ++h) {
    const auto counts = group_counts(h == 0 ? kNoAnomaly : Affected(h - 1));
    for (std::size_t g = 0; g < counts.size(); ++g) slot_groups_.insert(slot_groups_.end(), counts[g], g);
  }

  for (int x : outcomes_) {
    bool charged = false;
    for (std::size_t g = 0; g < 2 * types_.size(); ++g) charged = charged || group_distribution(g).pmf(x) > 0.0;
    if (!charged) continue;
    for (const auto& t : types_) {
      if (t.pre.pmf(x) == 0.0) ratio_unbounded_ = true;
    }
  }
}

const DiscreteDistribution& NetworkSpec::group_distribution(std::size_t g) const {
  const std::size_t k = types_.size();
  if (g >= 2 * k) throw ContractError("group index " + std::to_string(g) + " out of range");
  return g < k ? types_[g].pre : types_[g - k].post;
}

std::vector<std::size_t> NetworkSpec::group_counts(Affected affected) const {
  const std::size_t k = types_.size();
  std::vector<std::size_t> counts(2 * k, 0);
  for (std::size_t j = 0; j < k; ++j) counts[j] = types_[j].count;
  if (affected) {
    if (*affected >= k) throw ContractError("affected type " + std::to_string(*affected) + " out of range");
    counts[*affected] -= 1;
    counts[k + *affected] = 1;
  }
  return counts;
}

void NetworkSpec::sample_observation(Affected affected, Rng& rng, std::span<int> out) const {
  if (out.size() != sensors_) throw ContractError("observation buffer has wrong length");
  const std::size_t k = types_.size();
  if (affected && *affected >= k) throw ContractError("affected type " + std::to_string(*affected) + " out of range");
  const std::size_t* groups = slot_groups_.data() + (affected ? *affected + 1 : 0) * sensors_;
  for (std::size_t i = 0; i < sensors_; ++i) {
    const std::size_t g = groups[i];
    out[i] = (g < k ? types_[g].pre : types_[g - k].post).sample(rng);
  }
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(out[i - 1], out[j]);
  }
}

std::vector<int> NetworkSpec::sample_observation(Affected affected, Rng& rng) const {
  std::vector<int> out(sensors_);
  sample_observation(affected, rng, out);
  return out;
}

}  // namespace uqcd
