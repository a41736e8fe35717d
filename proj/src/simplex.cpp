#include "uqcd/simplex.hpp"

#include <cmath>
#include <string>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

WeightVector::WeightVector(std::vector<double> beta) : beta_(std::move(beta)) {
  if (beta_.empty()) throw ParameterError("weight vector is empty");
  CompensatedSum total;
  for (std::size_t k = 0; k < beta_.size(); ++k) {
    if (!(beta_[k] >= 0.0 && beta_[k] <= 1.0)) {
      throw ParameterError("weight " + std::to_string(k) + " lies outside [0, 1]");
    }
    total.add(beta_[k]);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw ParameterError("weights sum to " + std::to_string(total.value()) + ", not 1");
  }
}

WeightVector WeightVector::uniform(std::size_t k) {
  if (k == 0) throw ParameterError("weight vector is empty");
  return WeightVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

WeightVector WeightVector::unit(std::size_t k, std::size_t index) {
  if (index >= k) throw ParameterError("unit vector index out of range");
  std::vector<double> v(k, 0.0);
  v[index] = 1.0;
  return WeightVector(std::move(v));
}

}  // namespace uqcd
