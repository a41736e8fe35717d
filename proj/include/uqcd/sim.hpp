#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqcd/detect.hpp"
#include "uqcd/mixture.hpp"
#include "uqcd/rng.hpp"

namespace uqcd {

/// Sequence of affected types S[t] after the change.
class Trajectory {
 public:
  enum class Kind { none, static_type, iid, explicit_sequence };

  static Trajectory none();
  static Trajectory static_type(std::size_t k);
  /// Each step independently affects type k with probability probs[k].
  static Trajectory iid(std::vector<double> probs);
  /// Explicit S[1], S[2], ...; the last entry holds once the sequence ends.
  static Trajectory explicit_sequence(std::vector<Affected> seq);

  Kind kind() const noexcept { return kind_; }
  std::size_t static_index() const noexcept { return type_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<Affected>& sequence() const noexcept { return seq_; }

  /// Throws ParameterError if inconsistent with K types.
  void validate(std::size_t types) const;

  /// Affected type at post-change step t (1-based).
  Affected at(std::uint64_t t, Rng& rng) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::none;
  std::size_t type_ = 0;
  std::vector<double> probs_;
  std::vector<Affected> seq_;
};

/// One observation: a draw per sensor from its group law, then a uniform
/// random permutation of the entries.
std::vector<int> generate_observation(const NetworkSpec& net, Affected s, Rng& rng);

struct RunLengthEstimate {
  double mean = 0.0;        // steps; censored runs enter at the cap
  double std_error = 0.0;
  std::uint64_t censored = 0;
  std::uint64_t reps = 0;
};

struct OcRow {
  std::string detector;
  double threshold = 0.0;
  RunLengthEstimate add;
  RunLengthEstimate arl;
};

struct WaddProxy {
  RunLengthEstimate add;            // max over the trajectory set
  std::size_t worst_trajectory = 0; // index into the set
  std::vector<RunLengthEstimate> per_trajectory;
};

struct EvolutionTrace {
  std::vector<double> statistic;                 // one value per step
  std::optional<std::uint64_t> first_crossing;   // first t with statistic >= b
};

struct SimOptions {
  std::uint64_t cap = 1'000'000;   // censoring cap per run
  std::size_t threads = 1;         // worker count; never changes results
  std::uint64_t table_limit = LikelihoodTable::kDefaultMaxEntries;
};

/// Monte Carlo harness. Replication r of any estimate draws from
/// Rng(split_seed(seed, r)); replications are aggregated in index order so
/// results are bitwise reproducible for any worker count.
///
/// The change is placed at the first step for delay estimates (the CuSum
/// statistics start at zero, which is their worst case). Labels are not
/// searched: every detector is permutation invariant.
class Simulator {
 public:
  explicit Simulator(const MixtureModel& m, SimOptions opts = {});

  const MixtureModel& model() const noexcept { return *model_; }
  const SimOptions& options() const noexcept { return opts_; }
  bool uses_table() const noexcept { return table_ != nullptr; }

  RunLengthEstimate estimate_add(const DetectorConfig& det, const Trajectory& traj, std::size_t reps,
                                 std::uint64_t seed) const;
  RunLengthEstimate estimate_arl(const DetectorConfig& det, std::size_t reps, std::uint64_t seed) const;

  /// Worst-case ADD proxy: maximum of the ADD estimates over `set`, each
  /// trajectory run with the same seed.
  WaddProxy estimate_wadd_proxy(const DetectorConfig& det, std::span<const Trajectory> set,
                                std::size_t reps, std::uint64_t seed) const;

  /// Rows (detector, threshold) for every detector at every threshold.
  /// Threshold j uses oc_seed(seed, j) for all detectors (common random
  /// numbers) and for both its ADD and ARL estimates.
  std::vector<OcRow> operating_characteristic(std::span<const DetectorConfig> detectors,
                                              const Trajectory& traj, std::span<const double> thresholds,
                                              std::size_t reps, std::uint64_t seed) const;

  /// As above with ADD replaced by the worst-case proxy over `set`.
  std::vector<OcRow> operating_characteristic(std::span<const DetectorConfig> detectors,
                                              std::span<const Trajectory> set,
                                              std::span<const double> thresholds, std::size_t reps,
                                              std::uint64_t seed) const;

  /// Single seeded run of `horizon` steps with the anomaly active from
  /// `change_point` on; the statistic is recorded at every step.
  EvolutionTrace evolution_path(const DetectorConfig& det, const Trajectory& traj,
                                std::uint64_t change_point, std::uint64_t horizon,
                                std::uint64_t seed) const;

  /// Run length of one replication (change at `change_point`, or never).
  RunOutcome single_run(const DetectorConfig& det, const Trajectory& traj,
                        std::optional<std::uint64_t> change_point, Rng& rng) const;

 private:
  RunLengthEstimate run_many(const DetectorConfig& det, const Trajectory& traj,
                             std::optional<std::uint64_t> change_point, std::size_t reps,
                             std::uint64_t seed) const;

  // Increments per table entry for a weighted detector (empty for GM).
  std::vector<double> entry_increments(const DetectorConfig& det) const;
  RunOutcome run_once(const DetectorConfig& det, const Trajectory& traj,
                      std::optional<std::uint64_t> change_point, Rng& rng,
                      const std::vector<double>& increments) const;

  const MixtureModel* model_;
  std::unique_ptr<LikelihoodTable> table_;
  std::vector<double> table_ratios_;  // K per-type log-ratios per table entry
  const LikelihoodSource* source_;
  SimOptions opts_;
};

std::uint64_t oc_seed(std::uint64_t seed, std::size_t threshold_index);

/// Least-squares fit of ADD against ln(ARL).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_add_vs_log_arl(std::span<const OcRow> rows);

/// ADD at a target ARL by linear interpolation in ln(ARL) between the two
/// bracketing rows (rows sorted by threshold). The standard error combines
/// the bracketing ADD errors with the interpolation weights. nullopt when
/// the target lies outside the observed ARL range.
std::optional<RunLengthEstimate> add_at_arl(std::span<const OcRow> rows, double target_arl);

}  // namespace uqcd
