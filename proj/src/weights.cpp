#include "uqcd/weights.hpp"

#include <algorithm>
#include <cmath>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

namespace {

std::vector<double> normalized(std::vector<double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double total = s.value();
  for (double& x : v) x /= total;
  return v;
}

WeightVector snapped(const WeightVector& beta, double snap) {
  std::vector<double> v = beta.values();
  bool changed = false;
  for (double& x : v) {
    if (x > 0.0 && x < snap) {
      x = 0.0;
      changed = true;
    }
  }
  return changed ? WeightVector(normalized(std::move(v))) : beta;
}

double dot_positive(const WeightVector& beta, std::span<const double> drifts) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (beta[k] > 0.0) acc.add(beta[k] * drifts[k]);
  }
  return acc.value();
}

}  // namespace

double kkt_residual(const WeightVector& beta, std::span<const double> drifts, double i_beta) {
  double res = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (beta[k] > 0.0) {
      res = std::max(res, std::abs(drifts[k] - i_beta));
    } else {
      res = std::max(res, i_beta - drifts[k]);
    }
  }
  return res;
}

KktReport solve_optimal_weights(const ExpectationBasis& basis, const SolverOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iters == 0) throw ContractError("solver needs tol > 0 and max_iters >= 1");
  const std::size_t k_types = basis.types();
  KktReport rep;
  rep.exact = basis.is_exact();
  rep.mc_reps = basis.reps();

  WeightVector beta = WeightVector::uniform(k_types);
  std::vector<double> drifts = basis.type_drifts(beta);
  double objective = dot_positive(beta, drifts);
  rep.objective_history.push_back(objective);

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    rep.iterations = it;

    const WeightVector candidate = snapped(beta, opts.snap);
    std::vector<double> cand_drifts = candidate == beta ? drifts : basis.type_drifts(candidate);
    const double cand_obj = dot_positive(candidate, cand_drifts);
    const double res = kkt_residual(candidate, cand_drifts, cand_obj);
    if (res <= opts.tol) {
      rep.beta = candidate;
      rep.per_type_drift = std::move(cand_drifts);
      rep.i_beta = cand_obj;
      rep.residual = res;
      rep.converged = true;
      return rep;
    }

    // Gradient of I_beta is drift_k + 1; the constant cancels on the simplex.
    const double g_min = *std::min_element(drifts.begin(), drifts.end());
    bool accepted = false;
    for (double step = 1.0; step > 1e-20; step *= 0.5) {
      std::vector<double> next(k_types);
      for (std::size_t k = 0; k < k_types; ++k) next[k] = beta[k] * std::exp(-step * (drifts[k] - g_min));
      WeightVector trial(normalized(std::move(next)));
      const auto trial_drifts = basis.type_drifts(trial);
      const double trial_obj = dot_positive(trial, trial_drifts);
      if (trial_obj <= objective && !(trial == beta)) {
        accepted = true;
        beta = std::move(trial);
        drifts = trial_drifts;
        objective = trial_obj;
        rep.objective_history.push_back(objective);
        break;
      }
    }
    if (!accepted) break;
  }

  // Not converged: report the snapped iterate with its certificate.
  rep.beta = snapped(beta, opts.snap);
  rep.per_type_drift = basis.type_drifts(rep.beta);
  rep.i_beta = dot_positive(rep.beta, rep.per_type_drift);
  rep.residual = kkt_residual(rep.beta, rep.per_type_drift, rep.i_beta);
  rep.converged = rep.residual <= opts.tol;
  return rep;
}

KktReport solve_optimal_weights(const MixtureModel& m, const SolverOptions& opts,
                                std::uint64_t support_guard, std::size_t mc_reps,
                                std::uint64_t mc_seed) {
  if (ExpectationBasis::product_support_size(m) <= support_guard) {
    return solve_optimal_weights(ExpectationBasis::exact(m, support_guard), opts);
  }
  return solve_optimal_weights(ExpectationBasis::monte_carlo(m, mc_reps, mc_seed), opts);
}

std::vector<double> verify_lemma1(const ExpectationBasis& basis, const WeightVector& beta) {
  const auto drifts = basis.type_drifts(beta);
  const double i_beta = dot_positive(beta, drifts);
  std::vector<double> margins(drifts.size());
  for (std::size_t k = 0; k < drifts.size(); ++k) margins[k] = drifts[k] - i_beta;
  return margins;
}

}  // namespace uqcd
