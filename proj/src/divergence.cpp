#include "uqcd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

namespace {

// n! / prod_v mult_v! for a sorted index multiset.
double orbit_size(std::span<const std::size_t> sorted_idx) {
  GroupCounts runs;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted_idx.size(); ++i) {
    if (i < sorted_idx.size() && sorted_idx[i] == sorted_idx[i - 1]) {
      ++run;
    } else {
      runs.counts.push_back(run);
      run = 1;
    }
  }
  return static_cast<double>(label_space_size(runs));
}

}  // namespace

std::uint64_t ExpectationBasis::product_support_size(const MixtureModel& m) {
  const std::uint64_t u = m.network().outcomes().size();
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < m.sensors(); ++i) {
    if (size > UINT64_MAX / u) return UINT64_MAX;
    size *= u;
  }
  return size;
}

ExpectationBasis ExpectationBasis::exact(const MixtureModel& m, std::uint64_t support_guard) {
  const std::uint64_t full = product_support_size(m);
  if (full > support_guard) throw SupportGuardExceeded(full, support_guard);

  ExpectationBasis b;
  b.types_ = m.types();
  b.exact_ = true;
  b.laws_.resize(b.types_ + 1);

  const std::size_t u = m.network().outcomes().size();
  const std::size_t n = m.sensors();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> row(b.types_ + 1);
  while (true) {
    m.log_likelihoods_sorted(idx, row);
    const double mult = orbit_size(idx);
    if (row[0] != kNegInf) {
      for (std::size_t law = 0; law <= b.types_; ++law) {
        if (row[law] == kNegInf) continue;
        auto& pts = b.laws_[law];
        pts.weight.push_back(mult * std::exp(row[law]));
        for (std::size_t k = 0; k < b.types_; ++k) pts.ratios.push_back(row[k + 1] - row[0]);
      }
    }
    std::size_t pos = n;
    while (pos > 0 && idx[pos - 1] == u - 1) --pos;
    if (pos == 0) break;
    const std::size_t v = idx[pos - 1] + 1;
    for (std::size_t i = pos - 1; i < n; ++i) idx[i] = v;
  }
  return b;
}

ExpectationBasis ExpectationBasis::monte_carlo(const MixtureModel& m, std::size_t reps,
                                               std::uint64_t seed) {
  if (reps < 2) throw ContractError("Monte Carlo basis needs at least 2 draws per law");
  ExpectationBasis b;
  b.types_ = m.types();
  b.exact_ = false;
  b.reps_ = reps;
  b.laws_.resize(b.types_ + 1);
  const auto& net = m.network();
  std::vector<int> x(m.sensors());
  std::vector<double> row(b.types_ + 1);
  for (std::size_t law = 0; law <= b.types_; ++law) {
    Rng rng(split_seed(seed, law));
    const Affected affected = law == 0 ? kNoAnomaly : Affected(law - 1);
    auto& pts = b.laws_[law];
    pts.weight.assign(reps, 1.0 / static_cast<double>(reps));
    pts.ratios.reserve(reps * b.types_);
    for (std::size_t r = 0; r < reps; ++r) {
      net.sample_observation(affected, rng, x);
      m.log_likelihoods(x, row);
      for (std::size_t k = 0; k < b.types_; ++k) pts.ratios.push_back(row[k + 1] - row[0]);
    }
  }
  return b;
}

template <typename F>
double ExpectationBasis::expect(std::size_t law, F&& f) const {
  const auto& pts = laws_.at(law);
  CompensatedSum acc;
  for (std::size_t i = 0; i < pts.weight.size(); ++i) {
    const std::span<const double> r(pts.ratios.data() + i * types_, types_);
    acc.add(pts.weight[i] * f(r));
  }
  return acc.value();
}

double ExpectationBasis::weighted_drift(std::size_t law, const WeightVector& beta) const {
  if (beta.size() != types_) throw ContractError("weight vector length differs from K");
  return expect(law, [&](std::span<const double> r) { return weighted_log_ratio(r, beta); });
}

std::vector<double> ExpectationBasis::type_drifts(const WeightVector& beta) const {
  std::vector<double> out(types_);
  for (std::size_t k = 0; k < types_; ++k) out[k] = weighted_drift(k + 1, beta);
  return out;
}

std::vector<double> ExpectationBasis::type_drift_stderr(const WeightVector& beta) const {
  std::vector<double> out(types_, 0.0);
  if (exact_) return out;
  for (std::size_t k = 0; k < types_; ++k) {
    const auto& pts = laws_[k + 1];
    std::vector<double> v(pts.weight.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = weighted_log_ratio(std::span<const double>(pts.ratios.data() + i * types_, types_), beta);
    }
    out[k] = mean_and_stderr(v).std_error;
  }
  return out;
}

double ExpectationBasis::i_beta(const WeightVector& beta) const {
  const auto drifts = type_drifts(beta);
  CompensatedSum acc;
  for (std::size_t k = 0; k < types_; ++k) {
    if (beta[k] > 0.0) acc.add(beta[k] * drifts[k]);
  }
  return acc.value();
}

double ExpectationBasis::i_type(std::size_t k) const {
  if (k >= types_) throw ContractError("type index out of range");
  return expect(k + 1, [&](std::span<const double> r) { return r[k]; });
}

double ExpectationBasis::likelihood_ratio_mean(std::size_t law, std::size_t k) const {
  if (k >= types_) throw ContractError("type index out of range");
  return expect(law, [&](std::span<const double> r) { return std::exp(r[k]); });
}

double exact_divergence(const MixtureModel& m, const DivergenceTarget& target,
                        std::uint64_t support_guard) {
  const auto basis = ExpectationBasis::exact(m, support_guard);
  if (const auto* k = std::get_if<std::size_t>(&target)) return basis.i_type(*k);
  return basis.i_beta(std::get<WeightVector>(target));
}

McEstimate mc_divergence(const MixtureModel& m, const DivergenceTarget& target, std::size_t reps,
                         Rng& rng) {
  if (reps < 100) throw ContractError("mc_divergence needs reps >= 100");
  const auto& net = m.network();
  const std::size_t k_types = m.types();
  std::vector<int> x(m.sensors());
  std::vector<double> row(k_types + 1);
  std::vector<double> ratios(k_types);
  std::vector<double> draws(reps);

  const auto* type = std::get_if<std::size_t>(&target);
  const auto* beta = std::get_if<WeightVector>(&target);
  if (type && *type >= k_types) throw ContractError("type index out of range");
  if (beta && beta->size() != k_types) throw ContractError("weight vector length differs from K");

  for (std::size_t r = 0; r < reps; ++r) {
    std::size_t affected;
    if (type) {
      affected = *type;
    } else {
      // Categorical draw of the affected type from beta.
      const double u = rng.uniform();
      double acc = 0.0;
      affected = k_types - 1;
      for (std::size_t k = 0; k < k_types; ++k) {
        acc += (*beta)[k];
        if (u < acc && (*beta)[k] > 0.0) {
          affected = k;
          break;
        }
      }
      while ((*beta)[affected] == 0.0) --affected;
    }
    net.sample_observation(affected, rng, x);
    m.log_likelihoods(x, row);
    per_type_ratios(row, ratios);
    draws[r] = type ? ratios[*type] : weighted_log_ratio(ratios, *beta);
  }
  const auto ms = mean_and_stderr(draws);
  return {ms.mean, ms.std_error};
}

DivergenceReport information_report(const MixtureModel& m, std::uint64_t support_guard,
                                    std::size_t mc_reps, std::uint64_t mc_seed) {
  DivergenceReport rep;
  const std::size_t k_types = m.types();
  rep.per_type.resize(k_types);
  try {
    const auto basis = ExpectationBasis::exact(m, support_guard);
    for (std::size_t k = 0; k < k_types; ++k) rep.per_type[k] = basis.i_type(k);
    rep.exact = true;
  } catch (const SupportGuardExceeded&) {
    rep.exact = false;
    rep.mc_reps = mc_reps;
    rep.mc_stderr.resize(k_types);
    for (std::size_t k = 0; k < k_types; ++k) {
      Rng rng(split_seed(mc_seed, k));
      const auto est = mc_divergence(m, k, mc_reps, rng);
      rep.per_type[k] = est.estimate;
      rep.mc_stderr[k] = est.std_error;
    }
  }
  rep.argmin_type = 0;
  for (std::size_t k = 1; k < k_types; ++k) {
    if (rep.per_type[k] < rep.per_type[rep.argmin_type]) rep.argmin_type = k;
  }
  rep.i_star = rep.per_type[rep.argmin_type];
  return rep;
}

}  // namespace uqcd
