#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqcd/divergence.hpp"
#include "uqcd/mixture.hpp"
#include "uqcd/weights.hpp"

namespace uqcd {

struct PropertyCheck {
  std::string name;
  bool passed = false;
  bool skipped = false;   // instance too large for the check; counts as passed
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::uint64_t support_guard = kDefaultSupportGuard;
  std::uint64_t ordered_guard = 200'000;  // |outcomes|^n cap for the ordered-sum oracle
  SolverOptions solver;
  std::size_t mc_reps = 20'000;
};

/// Runs the invariant suite on one model: DP against brute force, exact
/// martingale normalization, drift identities and signs, the solver's KKT
/// certificate, permutation invariance, and recursion against batch.
std::vector<PropertyCheck> run_property_suite(const MixtureModel& m, const VerifyOptions& opts = {});

}  // namespace uqcd
