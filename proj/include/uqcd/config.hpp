#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqcd/detect.hpp"
#include "uqcd/network.hpp"
#include "uqcd/sim.hpp"

namespace uqcd {

/// Declared (unresolved) detector: threshold may come from gamma, and the
/// weighted detector's beta may be "optimal" (solved at run time).
struct DetectorDecl {
  Algorithm algorithm = Algorithm::gm;
  std::optional<double> threshold;
  std::optional<double> gamma;
  bool optimal_beta = false;
  std::optional<std::vector<double>> beta;
  std::string label;
};

struct SolverDecl {
  double tol = 1e-6;
  std::size_t max_iters = 10'000;
  std::size_t mc_reps = 20'000;
};

/// Validated experiment description.
struct ExperimentConfig {
  nlohmann::json network_decl;   // as written, for echoing
  NetworkSpec network;
  std::vector<DetectorDecl> detectors{};
  std::optional<Trajectory> trajectory{};
  std::vector<Trajectory> trajectories{};  // worst-case proxy set; may be empty
  std::uint64_t change_point = 1;
  std::uint64_t horizon = 1000;
  std::uint64_t cap = 1'000'000;
  std::size_t reps = 5000;
  std::uint64_t seed = 1;
  std::vector<double> thresholds{};
  SolverDecl solver{};
  std::uint64_t support_guard = 10'000'000;
  std::optional<std::string> output{};
};

/// Parses and validates a JSON document. Unknown keys are errors. Throws
/// ConfigError naming the offending field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Canonical JSON form with every default filled in. parse_config of the
/// result reproduces the same document.
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json trajectory_to_json(const Trajectory& t);

/// Threshold in nats for a declared detector (gamma calibrated per
/// algorithm), given K types.
double resolve_threshold(const DetectorDecl& d, std::size_t types);

}  // namespace uqcd
