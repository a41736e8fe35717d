#pragma once

#include <cstddef>
#include <vector>

namespace uqcd {

/// Point on the probability simplex over K sensor types.
class WeightVector {
 public:
  /// Validates entries in [0, 1] summing to 1 within 1e-12.
  explicit WeightVector(std::vector<double> beta);

  static WeightVector uniform(std::size_t k);
  static WeightVector unit(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return beta_.size(); }
  double operator[](std::size_t k) const { return beta_[k]; }
  const std::vector<double>& values() const noexcept { return beta_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> beta_;
};

}  // namespace uqcd
