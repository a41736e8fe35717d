#include "uqcd/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uqcd/error.hpp"
#include "uqcd/numeric.hpp"

namespace uqcd {

namespace {

double log_multinomial(std::span<const std::size_t> counts) {
  GroupCounts gc{std::vector<std::size_t>(counts.begin(), counts.end())};
  try {
    const std::uint64_t size = label_space_size(gc);
    if (size <= (std::uint64_t{1} << 53)) return std::log(static_cast<double>(size));
  } catch (const ContractError&) {
  }
  double out = std::lgamma(static_cast<double>(gc.total()) + 1.0);
  for (std::size_t c : counts) out -= std::lgamma(static_cast<double>(c) + 1.0);
  return out;
}

void check_length(const LikelihoodSource& src, std::span<const int> x) {
  if (x.size() != src.sensors()) {
    throw ContractError("observation has " + std::to_string(x.size()) + " entries, network has " +
                        std::to_string(src.sensors()) + " sensors");
  }
}

}  // namespace

MixtureModel::MixtureModel(NetworkSpec net) : net_(std::move(net)) {
  if (net_.ratio_unbounded()) {
    throw RatioUnbounded(
        "network is ratio-unbounded: some outcome has mass under one law but none under a "
        "pre-change law");
  }
  const auto& outcomes = net_.outcomes();
  first_outcome_ = outcomes.front();
  contiguous_ = outcomes.back() - outcomes.front() + 1 == static_cast<long>(outcomes.size());

  // Distinct laws among the 2K groups, in first-appearance order.
  const std::size_t k = net_.types();
  std::vector<std::size_t> law_of_group(2 * k);
  std::vector<const DiscreteDistribution*> laws;
  for (std::size_t g = 0; g < 2 * k; ++g) {
    const auto& d = net_.group_distribution(g);
    auto it = std::find_if(laws.begin(), laws.end(), [&](const auto* l) { return *l == d; });
    law_of_group[g] = static_cast<std::size_t>(it - laws.begin());
    if (it == laws.end()) laws.push_back(&d);
  }
  for (const auto* d : laws) {
    std::vector<double> row(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) row[i] = d->log_pmf(outcomes[i]);
    log_pmf_.push_back(std::move(row));
  }

  auto build = [&](Affected affected) {
    const auto counts = net_.group_counts(affected);
    std::vector<std::size_t> per_law(laws.size(), 0);
    for (std::size_t g = 0; g < counts.size(); ++g) per_law[law_of_group[g]] += counts[g];
    Config cfg;
    for (std::size_t l = 0; l < per_law.size(); ++l) {
      if (per_law[l] == 0) continue;
      cfg.law.push_back(l);
      cfg.capacity.push_back(per_law[l]);
    }
    cfg.stride.resize(cfg.law.size());
    for (std::size_t g = 0; g < cfg.law.size(); ++g) {
      cfg.stride[g] = cfg.states;
      cfg.states *= cfg.capacity[g] + 1;
    }
    cfg.log_label_count = log_multinomial(cfg.capacity);
    return cfg;
  };
  configs_.push_back(build(kNoAnomaly));
  for (std::size_t j = 0; j < k; ++j) configs_.push_back(build(j));
}

const MixtureModel::Config& MixtureModel::config(Affected affected) const {
  if (!affected) return configs_.front();
  if (*affected >= net_.types()) {
    throw ContractError("affected type " + std::to_string(*affected) + " out of range");
  }
  return configs_[*affected + 1];
}

std::uint64_t MixtureModel::state_count(Affected affected) const { return config(affected).states; }

std::size_t MixtureModel::outcome_index(int x) const noexcept {
  const auto& outcomes = net_.outcomes();
  if (contiguous_) {
    const long off = static_cast<long>(x) - first_outcome_;
    if (off < 0 || off >= static_cast<long>(outcomes.size())) return npos;
    return static_cast<std::size_t>(off);
  }
  const auto it = std::lower_bound(outcomes.begin(), outcomes.end(), x);
  if (it == outcomes.end() || *it != x) return npos;
  return static_cast<std::size_t>(it - outcomes.begin());
}

double MixtureModel::run_dp(const Config& cfg, std::span<const std::size_t> sorted_idx,
                            DpStats* stats) const {
  const std::size_t groups = cfg.law.size();
  // f[s]: log of the summed labeled likelihood of the first sum(used(s))
  // samples, where state s encodes per-group usage in mixed radix.
  std::vector<double> f(cfg.states, kNegInf);
  std::vector<std::size_t> used(groups, 0);
  f[0] = 0.0;
  std::size_t assigned = 0;
  std::uint64_t transitions = 0;
  for (std::size_t s = 0; s < cfg.states; ++s) {
    if (f[s] != kNegInf && assigned < sorted_idx.size()) {
      const std::size_t xi = sorted_idx[assigned];
      for (std::size_t g = 0; g < groups; ++g) {
        if (used[g] == cfg.capacity[g]) continue;
        const std::size_t t = s + cfg.stride[g];
        f[t] = log_add(f[t], f[s] + log_pmf_[cfg.law[g]][xi]);
        ++transitions;
      }
    }
    for (std::size_t g = 0; g < groups; ++g) {
      if (used[g] < cfg.capacity[g]) {
        ++used[g];
        ++assigned;
        break;
      }
      assigned -= used[g];
      used[g] = 0;
    }
  }
  if (stats) {
    stats->states += cfg.states;
    stats->transitions += transitions;
  }
  const double total = f[cfg.states - 1];
  return total == kNegInf ? kNegInf : total - cfg.log_label_count;
}

double MixtureModel::log_likelihood(Affected affected, std::span<const int> x, DpStats* stats) const {
  check_length(*this, x);
  const Config& cfg = config(affected);
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    idx[i] = outcome_index(x[i]);
    if (idx[i] == npos) return kNegInf;
  }
  std::sort(idx.begin(), idx.end());
  return run_dp(cfg, idx, stats);
}

void MixtureModel::log_likelihoods(std::span<const int> x, std::span<double> out) const {
  check_length(*this, x);
  if (out.size() != types() + 1) throw ContractError("likelihood row must have K+1 entries");
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    idx[i] = outcome_index(x[i]);
    if (idx[i] == npos) {
      std::fill(out.begin(), out.end(), kNegInf);
      return;
    }
  }
  std::sort(idx.begin(), idx.end());
  log_likelihoods_sorted(idx, out);
}

void MixtureModel::log_likelihoods_sorted(std::span<const std::size_t> sorted_idx,
                                          std::span<double> out) const {
  for (std::size_t h = 0; h < configs_.size(); ++h) out[h] = run_dp(configs_[h], sorted_idx, nullptr);
}

// --- LikelihoodTable -------------------------------------------------------

std::uint64_t LikelihoodTable::entries_needed(const MixtureModel& m) {
  // C(U + n - 1, n) with saturation.
  const std::uint64_t u = m.network().outcomes().size();
  const std::uint64_t n = m.sensors();
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    c = c * (u - 1 + i) / i;
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

LikelihoodTable::LikelihoodTable(const MixtureModel& m, std::uint64_t max_entries)
    : model_(&m), width_(m.types() + 1) {
  entries_ = entries_needed(m);
  if (entries_ > max_entries) throw SupportGuardExceeded(entries_, max_entries);

  const std::size_t u = m.network().outcomes().size();
  const std::size_t n = m.sensors();
  const std::size_t top = u + n;
  choose_.assign(top + 1, std::vector<std::uint64_t>(n + 2, 0));
  for (std::size_t a = 0; a <= top; ++a) {
    choose_[a][0] = 1;
    for (std::size_t b = 1; b <= std::min(a, n + 1); ++b) {
      choose_[a][b] = choose_[a - 1][b - 1] + (b <= a - 1 ? choose_[a - 1][b] : 0);
    }
  }

  rows_.assign(entries_ * width_, kNegInf);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    const std::uint64_t r = rank(idx);
    m.log_likelihoods_sorted(idx, std::span<double>(rows_.data() + r * width_, width_));
    // Next non-decreasing sequence.
    std::size_t pos = n;
    while (pos > 0 && idx[pos - 1] == u - 1) --pos;
    if (pos == 0) break;
    const std::size_t v = idx[pos - 1] + 1;
    for (std::size_t i = pos - 1; i < n; ++i) idx[i] = v;
  }
}

std::uint64_t LikelihoodTable::rank(std::span<const std::size_t> sorted_idx) const noexcept {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < sorted_idx.size(); ++i) r += choose_[sorted_idx[i] + i][i + 1];
  return r;
}

std::uint64_t LikelihoodTable::entry_of(std::span<const int> x) const {
  check_length(*this, x);
  std::size_t buf[64];
  std::vector<std::size_t> heap;
  std::size_t* idx = buf;
  if (x.size() > 64) {
    heap.resize(x.size());
    idx = heap.data();
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    idx[i] = model_->outcome_index(x[i]);
    if (idx[i] == MixtureModel::npos) return kNoEntry;
  }
  std::sort(idx, idx + x.size());
  return rank(std::span<const std::size_t>(idx, x.size()));
}

void LikelihoodTable::log_likelihoods(std::span<const int> x, std::span<double> out) const {
  if (out.size() != width_) throw ContractError("likelihood row must have K+1 entries");
  const std::uint64_t e = entry_of(x);
  if (e == kNoEntry) {
    std::fill(out.begin(), out.end(), kNegInf);
    return;
  }
  const auto r = row(e);
  std::copy(r.begin(), r.end(), out.begin());
}

// --- free functions ----------------------------------------------------------

double mixture_log_likelihood(const MixtureModel& m, Affected affected, std::span<const int> x) {
  return m.log_likelihood(affected, x);
}

double brute_force_mixture_log_likelihood(const MixtureModel& m, Affected affected,
                                          std::span<const int> x, std::uint64_t cap) {
  check_length(m, x);
  const auto& net = m.network();
  LabelEnumerator labels(GroupCounts{net.group_counts(affected)}, cap);
  LabelAssignment a;
  double acc = kNegInf;
  while (labels.next(a)) acc = log_add(acc, labeled_log_likelihood(net, affected, a, x));
  return acc == kNegInf ? kNegInf : acc - std::log(static_cast<double>(labels.size()));
}

double per_type_log_ratio(const MixtureModel& m, std::size_t k, std::span<const int> x) {
  const double pre = m.log_likelihood(kNoAnomaly, x);
  if (pre == kNegInf) throw ContractError("observation has zero probability before the change");
  return m.log_likelihood(k, x) - pre;
}

double weighted_mixture_log_ratio(const MixtureModel& m, const WeightVector& beta,
                                  std::span<const int> x) {
  if (beta.size() != m.types()) throw ContractError("weight vector length differs from K");
  std::vector<double> row(m.types() + 1);
  std::vector<double> ratios(m.types());
  m.log_likelihoods(x, row);
  per_type_ratios(row, ratios);
  return weighted_log_ratio(ratios, beta);
}

void per_type_ratios(std::span<const double> row, std::span<double> out) {
  if (row.front() == kNegInf) throw ContractError("observation has zero probability before the change");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = row[k + 1] - row[0];
}

double weighted_log_ratio(std::span<const double> ratios, const WeightVector& beta) {
  double hi = kNegInf;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (beta[k] > 0.0) hi = std::max(hi, ratios[k]);
  }
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (beta[k] > 0.0) acc += beta[k] * std::exp(ratios[k] - hi);
  }
  return hi + std::log(acc);
}

}  // namespace uqcd
