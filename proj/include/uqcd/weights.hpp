#pragma once

#include <cstddef>
#include <vector>

#include "uqcd/divergence.hpp"
#include "uqcd/simplex.hpp"

namespace uqcd {

struct SolverOptions {
  double tol = 1e-6;            // KKT residual target, nats
  std::size_t max_iters = 10'000;
  double snap = 1e-9;           // weights below this are set to zero
};

/// Outcome of the beta* solve together with its KKT certificate.
struct KktReport {
  WeightVector beta = WeightVector::uniform(1);
  double i_beta = 0.0;
  std::vector<double> per_type_drift;  // E^k[l_beta], nats
  double residual = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  bool exact = true;                   // false: Monte Carlo basis
  std::size_t mc_reps = 0;
  std::vector<double> objective_history;  // I_beta after each accepted step
};

/// Stationarity residual: max over positive-weight types of
/// |drift_k - I_beta| and over zero-weight types of (I_beta - drift_k)^+.
double kkt_residual(const WeightVector& beta, std::span<const double> drifts, double i_beta);

/// Minimizes I_beta over the simplex by mirror descent (multiplicative
/// weights) with backtracking: start at the uniform vector, step size 1.0
/// halved until the objective does not increase. Stops once the snapped
/// iterate has KKT residual <= tol.
KktReport solve_optimal_weights(const ExpectationBasis& basis, const SolverOptions& opts = {});

/// Builds the exact basis when the support guard allows, otherwise a
/// Monte Carlo basis with `mc_reps` draws per law.
KktReport solve_optimal_weights(const MixtureModel& m, const SolverOptions& opts = {},
                                std::uint64_t support_guard = kDefaultSupportGuard,
                                std::size_t mc_reps = 20'000, std::uint64_t mc_seed = 1);

/// margin_k = E^k[l_beta] - I_beta. At beta* every margin is >= 0 and
/// positive-weight margins vanish.
std::vector<double> verify_lemma1(const ExpectationBasis& basis, const WeightVector& beta);

}  // namespace uqcd
