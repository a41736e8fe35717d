#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace uqcd {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; -inf operands short-circuit.
inline double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(v_i)). Empty input and all -inf give -inf.
inline double log_sum_exp(std::span<const double> v) noexcept {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Neumaier compensated summation. Order-dependent but far less so than a
/// naive loop; reductions feed values in a fixed order.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Mean and standard error of a fixed-order sample.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanStderr mean_and_stderr(std::span<const double> v) {
  MeanStderr out;
  if (v.empty()) return out;
  CompensatedSum s;
  for (double x : v) s.add(x);
  out.mean = s.value() / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  CompensatedSum ss;
  for (double x : v) ss.add((x - out.mean) * (x - out.mean));
  const double var = ss.value() / static_cast<double>(v.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

}  // namespace uqcd
