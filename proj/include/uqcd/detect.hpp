#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uqcd/mixture.hpp"
#include "uqcd/simplex.hpp"

namespace uqcd {

enum class Algorithm { gm, weighted, bayes_uniform };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// GM-CuSum: K parallel CuSums on the per-type mixture log-ratios; the
/// statistic is their maximum.
class GmCusumState {
 public:
  explicit GmCusumState(std::size_t types);

  /// W_k <- max(W_k, 0) + r_k.
  void step(std::span<const double> ratios);

  double statistic() const noexcept;
  /// Type with the largest W_k (lowest index on ties).
  std::size_t argmax() const noexcept;
  std::span<const double> per_type() const noexcept { return w_; }
  std::uint64_t time() const noexcept { return t_; }

 private:
  std::vector<double> w_;
  std::uint64_t t_ = 0;
};

/// Scalar CuSum on the weighted mixture log-ratio l_beta.
class WeightedCusumState {
 public:
  explicit WeightedCusumState(WeightVector beta);

  /// W <- max(W, 0) + l_beta(r).
  void step(std::span<const double> ratios);
  void step_increment(double ell) noexcept;

  double statistic() const noexcept { return w_; }
  std::uint64_t time() const noexcept { return t_; }
  const WeightVector& beta() const noexcept { return beta_; }

 private:
  WeightVector beta_;
  double w_ = 0.0;
  std::uint64_t t_ = 0;
};

/// Model-level steps: evaluate the increments of x through `m`.
void gm_step(GmCusumState& s, const MixtureModel& m, std::span<const int> x);
void weighted_step(WeightedCusumState& s, const MixtureModel& m, std::span<const int> x);

/// The uniform-weight mixture CuSum used as the Bayesian baseline.
WeightedCusumState bayes_uniform_detector(const MixtureModel& m);

/// Detector configuration. `beta` is used by the weighted algorithm only.
struct DetectorConfig {
  Algorithm algorithm = Algorithm::gm;
  std::optional<WeightVector> beta;
  double threshold = 1.0;  // nats, > 0
  std::string label;
};

/// GM: ln(K gamma); weighted and bayes-uniform: ln(gamma). gamma > 1.
double calibrate_threshold(Algorithm algorithm, std::size_t types, double gamma);

/// Runtime-selected detector.
class Detector {
 public:
  Detector(const DetectorConfig& cfg, std::size_t types);

  void step(std::span<const double> ratios);
  double statistic() const noexcept;
  std::uint64_t time() const noexcept;
  double threshold() const noexcept { return threshold_; }

 private:
  std::variant<GmCusumState, WeightedCusumState> state_;
  double threshold_;
};

struct RunOutcome {
  std::optional<std::uint64_t> stop;  // nullopt: censored at cap
  std::uint64_t steps = 0;
  std::vector<double> trace;          // statistic per step when requested
};

/// Steps the detector on stream(t, ratios) for t = 1, 2, ... until the
/// statistic reaches the threshold or `cap` steps elapse.
template <typename Stream>
RunOutcome run_to_stop(Detector& det, Stream&& stream, std::uint64_t cap, std::size_t types,
                       bool trace = false) {
  RunOutcome out;
  std::vector<double> ratios(types);
  for (std::uint64_t t = 1; t <= cap; ++t) {
    stream(t, std::span<double>(ratios));
    det.step(ratios);
    out.steps = t;
    if (trace) out.trace.push_back(det.statistic());
    if (det.statistic() >= det.threshold()) {
      out.stop = t;
      break;
    }
  }
  return out;
}

}  // namespace uqcd
