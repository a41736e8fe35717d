#include "uqcd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

// --- Trajectory ------------------------------------------------------------

Trajectory Trajectory::none() { return Trajectory{}; }

Trajectory Trajectory::static_type(std::size_t k) {
  Trajectory t;
  t.kind_ = Kind::static_type;
  t.type_ = k;
  return t;
}

Trajectory Trajectory::iid(std::vector<double> probs) {
  Trajectory t;
  t.kind_ = Kind::iid;
  t.probs_ = std::move(probs);
  return t;
}

Trajectory Trajectory::explicit_sequence(std::vector<Affected> seq) {
  if (seq.empty()) throw ParameterError("explicit trajectory is empty");
  Trajectory t;
  t.kind_ = Kind::explicit_sequence;
  t.seq_ = std::move(seq);
  return t;
}

void Trajectory::validate(std::size_t types) const {
  switch (kind_) {
    case Kind::none:
      return;
    case Kind::static_type:
      if (type_ >= types) throw ParameterError("static trajectory type out of range");
      return;
    case Kind::iid: {
      if (probs_.size() != types) throw ParameterError("iid trajectory needs one probability per type");
      WeightVector check(probs_);  // simplex validation
      return;
    }
    case Kind::explicit_sequence:
      for (const auto& s : seq_) {
        if (s && *s >= types) throw ParameterError("explicit trajectory names a type out of range");
      }
      return;
  }
}

Affected Trajectory::at(std::uint64_t t, Rng& rng) const {
  switch (kind_) {
    case Kind::none:
      return kNoAnomaly;
    case Kind::static_type:
      return type_;
    case Kind::iid: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t k = 0; k < probs_.size(); ++k) {
        acc += probs_[k];
        if (u < acc && probs_[k] > 0.0) return k;
      }
      std::size_t k = probs_.size() - 1;
      while (probs_[k] == 0.0) --k;
      return k;
    }
    case Kind::explicit_sequence:
      return seq_[std::min<std::uint64_t>(t, seq_.size()) - 1];
  }
  return kNoAnomaly;
}

std::string Trajectory::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::none:
      os << "none";
      break;
    case Kind::static_type:
      os << "static(" << type_ + 1 << ")";
      break;
    case Kind::iid:
      os << "iid(";
      for (std::size_t k = 0; k < probs_.size(); ++k) os << (k ? "," : "") << probs_[k];
      os << ")";
      break;
    case Kind::explicit_sequence:
      os << "explicit[" << seq_.size() << "]";
      break;
  }
  return os.str();
}

std::vector<int> generate_observation(const NetworkSpec& net, Affected s, Rng& rng) {
  return net.sample_observation(s, rng);
}

// --- Simulator -------------------------------------------------------------

Simulator::Simulator(const MixtureModel& m, SimOptions opts) : model_(&m), source_(&m), opts_(opts) {
  if (opts_.cap < 1) throw ParameterError("censoring cap must be >= 1");
  if (opts_.threads < 1) opts_.threads = 1;
  if (LikelihoodTable::entries_needed(m) <= opts_.table_limit) {
    table_ = std::make_unique<LikelihoodTable>(m, opts_.table_limit);
    source_ = table_.get();
    const std::size_t k_types = m.types();
    table_ratios_.assign(table_->entries() * k_types, std::numeric_limits<double>::quiet_NaN());
    for (std::uint64_t e = 0; e < table_->entries(); ++e) {
      const auto row = table_->row(e);
      if (row[0] == kNegInf) continue;  // unreachable multiset
      per_type_ratios(row, std::span<double>(table_ratios_.data() + e * k_types, k_types));
    }
  }
}

std::vector<double> Simulator::entry_increments(const DetectorConfig& det) const {
  if (!table_ || det.algorithm == Algorithm::gm) return {};
  const std::size_t k_types = model_->types();
  const WeightVector beta = det.algorithm == Algorithm::bayes_uniform ? WeightVector::uniform(k_types)
                            : det.beta ? *det.beta
                                       : throw ParameterError("weighted detector needs a weight vector");
  if (beta.size() != k_types) throw ParameterError("weight vector length differs from K");
  std::vector<double> out(table_->entries(), std::numeric_limits<double>::quiet_NaN());
  for (std::uint64_t e = 0; e < table_->entries(); ++e) {
    if (table_->row(e)[0] == kNegInf) continue;
    out[e] = weighted_log_ratio(std::span<const double>(table_ratios_.data() + e * k_types, k_types), beta);
  }
  return out;
}

RunOutcome Simulator::single_run(const DetectorConfig& det, const Trajectory& traj,
                                 std::optional<std::uint64_t> change_point, Rng& rng) const {
  return run_once(det, traj, change_point, rng, entry_increments(det));
}

// With a table the per-step work is a lookup of precomputed increments; the
// values are the ones the generic path computes, so stop times agree bitwise.
RunOutcome Simulator::run_once(const DetectorConfig& det, const Trajectory& traj,
                               std::optional<std::uint64_t> change_point, Rng& rng,
                               const std::vector<double>& increments) const {
  const auto& net = model_->network();
  if (table_) {
    const std::size_t k_types = model_->types();
    if (!(det.threshold > 0.0)) throw ParameterError("detector threshold must be positive");
    std::vector<int> x(net.sensors());
    RunOutcome out;
    auto next_entry = [&](std::uint64_t t) {
      Affected s = kNoAnomaly;
      if (change_point && t >= *change_point) s = traj.at(t - *change_point + 1, rng);
      net.sample_observation(s, rng, x);
      return table_->entry_of(x);
    };
    if (det.algorithm == Algorithm::gm) {
      GmCusumState state(k_types);
      for (std::uint64_t t = 1; t <= opts_.cap; ++t) {
        const std::uint64_t e = next_entry(t);
        state.step(std::span<const double>(table_ratios_.data() + e * k_types, k_types));
        out.steps = t;
        if (state.statistic() >= det.threshold) {
          out.stop = t;
          break;
        }
      }
    } else {
      WeightedCusumState state(det.algorithm == Algorithm::weighted ? *det.beta : WeightVector::uniform(k_types));
      for (std::uint64_t t = 1; t <= opts_.cap; ++t) {
        state.step_increment(increments[next_entry(t)]);
        out.steps = t;
        if (state.statistic() >= det.threshold) {
          out.stop = t;
          break;
        }
      }
    }
    return out;
  }
  const std::size_t k_types = model_->types();
  Detector detector(det, k_types);
  std::vector<int> x(net.sensors());
  std::vector<double> row(k_types + 1);
  auto stream = [&](std::uint64_t t, std::span<double> ratios) {
    Affected s = kNoAnomaly;
    if (change_point && t >= *change_point) s = traj.at(t - *change_point + 1, rng);
    net.sample_observation(s, rng, x);
    source_->log_likelihoods(x, row);
    per_type_ratios(row, ratios);
  };
  return run_to_stop(detector, stream, opts_.cap, k_types);
}

RunLengthEstimate Simulator::run_many(const DetectorConfig& det, const Trajectory& traj,
                                      std::optional<std::uint64_t> change_point, std::size_t reps,
                                      std::uint64_t seed) const {
  if (reps < 1) throw ParameterError("reps must be >= 1");
  traj.validate(model_->types());
  std::vector<double> lengths(reps);
  std::vector<unsigned char> censored(reps, 0);

  const auto increments = entry_increments(det);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng(split_seed(seed, r));
      const auto out = run_once(det, traj, change_point, rng, increments);
      lengths[r] = static_cast<double>(out.stop ? *out.stop : opts_.cap);
      censored[r] = out.stop ? 0 : 1;
    }
  };

  const std::size_t workers = std::min(opts_.threads, reps);
  if (workers <= 1) {
    work(0, reps);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (reps + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(reps, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  const auto ms = mean_and_stderr(lengths);
  RunLengthEstimate est;
  est.mean = ms.mean;
  est.std_error = ms.std_error;
  est.reps = reps;
  for (unsigned char c : censored) est.censored += c;
  return est;
}

RunLengthEstimate Simulator::estimate_add(const DetectorConfig& det, const Trajectory& traj,
                                          std::size_t reps, std::uint64_t seed) const {
  if (traj.kind() == Trajectory::Kind::none) throw ParameterError("delay estimate needs an anomaly trajectory");
  return run_many(det, traj, std::uint64_t{1}, reps, seed);
}

RunLengthEstimate Simulator::estimate_arl(const DetectorConfig& det, std::size_t reps,
                                          std::uint64_t seed) const {
  return run_many(det, Trajectory::none(), std::nullopt, reps, seed);
}

WaddProxy Simulator::estimate_wadd_proxy(const DetectorConfig& det, std::span<const Trajectory> set,
                                         std::size_t reps, std::uint64_t seed) const {
  if (set.empty()) throw ParameterError("trajectory set is empty");
  WaddProxy out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.per_trajectory.push_back(estimate_add(det, set[i], reps, seed));
    if (i == 0 || out.per_trajectory[i].mean > out.add.mean) {
      out.add = out.per_trajectory[i];
      out.worst_trajectory = i;
    }
  }
  return out;
}

std::uint64_t oc_seed(std::uint64_t seed, std::size_t threshold_index) {
  return split_seed(seed, 0x0c0000 + threshold_index);
}

std::vector<OcRow> Simulator::operating_characteristic(std::span<const DetectorConfig> detectors,
                                                       const Trajectory& traj,
                                                       std::span<const double> thresholds,
                                                       std::size_t reps, std::uint64_t seed) const {
  return operating_characteristic(detectors, std::span<const Trajectory>(&traj, 1), thresholds, reps, seed);
}

std::vector<OcRow> Simulator::operating_characteristic(std::span<const DetectorConfig> detectors,
                                                       std::span<const Trajectory> set,
                                                       std::span<const double> thresholds,
                                                       std::size_t reps, std::uint64_t seed) const {
  for (std::size_t j = 1; j < thresholds.size(); ++j) {
    if (!(thresholds[j] > thresholds[j - 1])) throw ParameterError("thresholds must be increasing");
  }
  std::vector<OcRow> rows;
  for (const auto& base : detectors) {
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      DetectorConfig det = base;
      det.threshold = thresholds[j];
      const std::uint64_t s = oc_seed(seed, j);
      OcRow row;
      row.detector = det.label.empty() ? to_string(det.algorithm) : det.label;
      row.threshold = thresholds[j];
      row.add = set.size() == 1 ? estimate_add(det, set.front(), reps, s)
                                : estimate_wadd_proxy(det, set, reps, s).add;
      row.arl = estimate_arl(det, reps, s);
      rows.push_back(row);
    }
  }
  return rows;
}

EvolutionTrace Simulator::evolution_path(const DetectorConfig& det, const Trajectory& traj,
                                         std::uint64_t change_point, std::uint64_t horizon,
                                         std::uint64_t seed) const {
  if (change_point < 1) throw ParameterError("change point must be >= 1");
  traj.validate(model_->types());
  const auto& net = model_->network();
  const std::size_t k_types = model_->types();
  Detector detector(det, k_types);
  Rng rng(seed);
  std::vector<int> x(net.sensors());
  std::vector<double> row(k_types + 1);
  std::vector<double> ratios(k_types);
  EvolutionTrace out;
  out.statistic.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    Affected s = kNoAnomaly;
    if (t >= change_point) s = traj.at(t - change_point + 1, rng);
    net.sample_observation(s, rng, x);
    source_->log_likelihoods(x, row);
    per_type_ratios(row, ratios);
    detector.step(ratios);
    out.statistic.push_back(detector.statistic());
    if (!out.first_crossing && detector.statistic() >= detector.threshold()) out.first_crossing = t;
  }
  return out;
}

// --- curve analysis --------------------------------------------------------

LineFit fit_add_vs_log_arl(std::span<const OcRow> rows) {
  if (rows.size() < 2) throw ContractError("line fit needs at least two rows");
  CompensatedSum sx, sy;
  for (const auto& r : rows) {
    sx.add(std::log(r.arl.mean));
    sy.add(r.add.mean);
  }
  const double n = static_cast<double>(rows.size());
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sxy, sxx;
  for (const auto& r : rows) {
    const double dx = std::log(r.arl.mean) - mx;
    sxy.add(dx * (r.add.mean - my));
    sxx.add(dx * dx);
  }
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::optional<RunLengthEstimate> add_at_arl(std::span<const OcRow> rows, double target_arl) {
  const double target = std::log(target_arl);
  for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
    const double lo = std::log(rows[j].arl.mean);
    const double hi = std::log(rows[j + 1].arl.mean);
    if (!(target >= std::min(lo, hi) && target <= std::max(lo, hi))) continue;
    const double w = hi == lo ? 0.0 : (target - lo) / (hi - lo);
    RunLengthEstimate out;
    out.mean = (1.0 - w) * rows[j].add.mean + w * rows[j + 1].add.mean;
    out.std_error = std::hypot((1.0 - w) * rows[j].add.std_error, w * rows[j + 1].add.std_error);
    out.reps = rows[j].add.reps;
    out.censored = rows[j].add.censored + rows[j + 1].add.censored;
    return out;
  }
  return std::nullopt;
}

}  // namespace uqcd
