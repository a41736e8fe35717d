#pragma once

// Reference computations that share no code with the library: pmfs from the
// closed-form binomial, mixtures as plain averages over all n! orderings of
// the sensor slots, and divergences as sums over every ordered observation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

using Pmf = std::map<int, double>;

inline double choose(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline Pmf binomial(int trials, double p) {
  Pmf out;
  for (int k = 0; k <= trials; ++k) out[k] = choose(trials, k) * std::pow(p, k) * std::pow(1.0 - p, trials - k);
  return out;
}

inline double at(const Pmf& f, int x) {
  const auto it = f.find(x);
  return it == f.end() ? 0.0 : it->second;
}

inline double kl(const Pmf& a, const Pmf& b) {
  double s = 0.0;
  for (const auto& [x, p] : a) {
    if (p > 0.0) s += p * std::log(p / at(b, x));
  }
  return s;
}

struct Type {
  int count;
  Pmf pre;
  Pmf post;
};

struct Net {
  std::vector<Type> types;

  int sensors() const {
    int n = 0;
    for (const auto& t : types) n += t.count;
    return n;
  }

  std::vector<int> outcomes() const {
    std::vector<int> out;
    for (const auto& t : types) {
      for (const auto& [x, p] : t.pre) out.push_back(x);
      for (const auto& [x, p] : t.post) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Slot laws under hypothesis h (-1: no anomaly, k: the first sensor of
  // type k follows the post-change law).
  std::vector<const Pmf*> slots(int h) const {
    std::vector<const Pmf*> out;
    for (int k = 0; k < static_cast<int>(types.size()); ++k) {
      for (int c = 0; c < types[k].count; ++c) out.push_back(c == 0 && k == h ? &types[k].post : &types[k].pre);
    }
    return out;
  }
};

// (1/n!) sum over all orderings pi of prod_i p_{slot pi(i)}(x_i).
inline double mixture(const Net& net, int h, const std::vector<int>& x) {
  const auto slots = net.slots(h);
  std::vector<int> perm(slots.size());
  std::iota(perm.begin(), perm.end(), 0);
  double sum = 0.0;
  double count = 0.0;
  do {
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) prod *= at(*slots[perm[i]], x[i]);
    sum += prod;
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / count;
}

// Every ordered observation with its K+1 mixture probabilities.
struct Table {
  std::vector<std::vector<int>> xs;
  std::vector<std::vector<double>> probs;  // [x][0] = P0, [x][k+1] = P^k
};

inline Table tabulate(const Net& net) {
  const auto outcomes = net.outcomes();
  const int n = net.sensors();
  const int k_types = static_cast<int>(net.types.size());
  Table t;
  std::vector<std::size_t> digits(n, 0);
  while (true) {
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = outcomes[digits[i]];
    std::vector<double> row(k_types + 1);
    for (int h = -1; h < k_types; ++h) row[h + 1] = mixture(net, h, x);
    t.xs.push_back(x);
    t.probs.push_back(row);
    int i = 0;
    while (i < n && ++digits[i] == outcomes.size()) digits[i++] = 0;
    if (i == n) break;
  }
  return t;
}

inline double weighted(const std::vector<double>& row, const std::vector<double>& beta) {
  double s = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) s += beta[k] * row[k + 1];
  return s;
}

// D(P^beta || P0).
inline double i_beta(const Table& t, const std::vector<double>& beta) {
  double s = 0.0;
  for (const auto& row : t.probs) {
    const double pb = weighted(row, beta);
    if (pb > 0.0) s += pb * std::log(pb / row[0]);
  }
  return s;
}

inline double i_type(const Table& t, std::size_t k, std::size_t types) {
  std::vector<double> e(types, 0.0);
  e[k] = 1.0;
  return i_beta(t, e);
}

// D(P0 || P^beta).
inline double reverse_divergence(const Table& t, const std::vector<double>& beta) {
  double s = 0.0;
  for (const auto& row : t.probs) {
    if (row[0] > 0.0) s += row[0] * std::log(row[0] / weighted(row, beta));
  }
  return s;
}

// E^k[log(P^beta / P0)].
inline double drift(const Table& t, std::size_t law, const std::vector<double>& beta) {
  double s = 0.0;
  for (const auto& row : t.probs) {
    if (row[law] > 0.0) s += row[law] * std::log(weighted(row, beta) / row[0]);
  }
  return s;
}

struct GridMin {
  double beta1 = 0.0;
  double value = 0.0;
};

// min over beta_1 in {0, 0.001, ..., 1} of I_beta for two types.
inline GridMin grid_search(const Table& t) {
  GridMin best{0.0, INFINITY};
  for (int i = 0; i <= 1000; ++i) {
    const double b = i / 1000.0;
    const double v = i_beta(t, {b, 1.0 - b});
    if (v < best.value) best = {b, v};
  }
  return best;
}

// max_k max_{1<=j<=t} sum_{i=j}^t r_k[i], evaluated left to right from j.
inline double batch_gm(const std::vector<std::vector<double>>& r, std::size_t t) {
  double best = -INFINITY;
  for (std::size_t k = 0; k < r[0].size(); ++k) {
    for (std::size_t j = 0; j <= t; ++j) {
      double s = r[j][k];
      for (std::size_t i = j + 1; i <= t; ++i) s += r[i][k];
      best = std::max(best, s);
    }
  }
  return best;
}

inline double batch_scalar(const std::vector<double>& ell, std::size_t t) {
  double best = -INFINITY;
  for (std::size_t j = 0; j <= t; ++j) {
    double s = ell[j];
    for (std::size_t i = j + 1; i <= t; ++i) s += ell[i];
    best = std::max(best, s);
  }
  return best;
}

}  // namespace oracle
