#include "uqcd/detect.hpp"

#include <algorithm>
#include <cmath>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::gm:
      return "gm";
    case Algorithm::weighted:
      return "weighted";
    case Algorithm::bayes_uniform:
      return "bayes-uniform";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "gm") return Algorithm::gm;
  if (name == "weighted") return Algorithm::weighted;
  if (name == "bayes-uniform") return Algorithm::bayes_uniform;
  throw ParameterError("unknown detector algorithm '" + name + "'");
}

GmCusumState::GmCusumState(std::size_t types) : w_(types, 0.0) {
  if (types == 0) throw ContractError("GM-CuSum needs at least one type");
}

void GmCusumState::step(std::span<const double> ratios) {
  if (ratios.size() != w_.size()) throw ContractError("ratio vector length differs from K");
  for (std::size_t k = 0; k < w_.size(); ++k) w_[k] = std::max(w_[k], 0.0) + ratios[k];
  ++t_;
}

double GmCusumState::statistic() const noexcept { return *std::max_element(w_.begin(), w_.end()); }

std::size_t GmCusumState::argmax() const noexcept {
  return static_cast<std::size_t>(std::max_element(w_.begin(), w_.end()) - w_.begin());
}

WeightedCusumState::WeightedCusumState(WeightVector beta) : beta_(std::move(beta)) {}

void WeightedCusumState::step(std::span<const double> ratios) {
  if (ratios.size() != beta_.size()) throw ContractError("ratio vector length differs from K");
  step_increment(weighted_log_ratio(ratios, beta_));
}

void WeightedCusumState::step_increment(double ell) noexcept {
  w_ = std::max(w_, 0.0) + ell;
  ++t_;
}

void gm_step(GmCusumState& s, const MixtureModel& m, std::span<const int> x) {
  std::vector<double> row(m.types() + 1);
  std::vector<double> ratios(m.types());
  m.log_likelihoods(x, row);
  per_type_ratios(row, ratios);
  s.step(ratios);
}

void weighted_step(WeightedCusumState& s, const MixtureModel& m, std::span<const int> x) {
  std::vector<double> row(m.types() + 1);
  std::vector<double> ratios(m.types());
  m.log_likelihoods(x, row);
  per_type_ratios(row, ratios);
  s.step(ratios);
}

WeightedCusumState bayes_uniform_detector(const MixtureModel& m) {
  return WeightedCusumState(WeightVector::uniform(m.types()));
}

double calibrate_threshold(Algorithm algorithm, std::size_t types, double gamma) {
  if (!(gamma > 1.0)) throw ParameterError("target run length gamma must exceed 1");
  if (algorithm == Algorithm::gm) return std::log(static_cast<double>(types) * gamma);
  return std::log(gamma);
}

namespace {

std::variant<GmCusumState, WeightedCusumState> make_state(const DetectorConfig& cfg, std::size_t types) {
  switch (cfg.algorithm) {
    case Algorithm::gm:
      return GmCusumState(types);
    case Algorithm::bayes_uniform:
      return WeightedCusumState(WeightVector::uniform(types));
    case Algorithm::weighted:
      if (!cfg.beta) throw ParameterError("weighted detector needs a weight vector");
      if (cfg.beta->size() != types) throw ParameterError("weight vector length differs from K");
      return WeightedCusumState(*cfg.beta);
  }
  throw ParameterError("unknown detector algorithm");
}

}  // namespace

Detector::Detector(const DetectorConfig& cfg, std::size_t types)
    : state_(make_state(cfg, types)), threshold_(cfg.threshold) {
  if (!(cfg.threshold > 0.0)) throw ParameterError("detector threshold must be positive");
}

void Detector::step(std::span<const double> ratios) {
  std::visit([&](auto& s) { s.step(ratios); }, state_);
}

double Detector::statistic() const noexcept {
  return std::visit([](const auto& s) { return s.statistic(); }, state_);
}

std::uint64_t Detector::time() const noexcept {
  return std::visit([](const auto& s) { return s.time(); }, state_);
}

}  // namespace uqcd
