// Test-only reference implementations. Everything here is deliberately
// naive and shares no code path with the library algorithms it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "tsg/instance.hpp"
#include "tsg/matching.hpp"
#include "tsg/rng.hpp"

namespace oracle {

/// Shortest tour over S by trying all |S|! visiting orders.
inline double brute_force_tour(const tsg::Instance& inst, tsg::Coalition s) {
  std::vector<int> order = s.members();
  if (order.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = inst.d(0, order.front());
    for (std::size_t t = 1; t < order.size(); ++t) len += inst.d(order[t - 1], order[t]);
    len += inst.d(order.back(), 0);
    best = std::min(best, len);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

/// Minimum perfect matching weight by DP over vertex subsets (k <= ~20).
inline double subset_dp_matching(const tsg::WeightMatrix& w) {
  const int k = w.size;
  const std::size_t states = std::size_t{1} << k;
  std::vector<double> best(states, std::numeric_limits<double>::infinity());
  best[0] = 0.0;
  for (std::size_t mask = 0; mask < states; ++mask) {
    if (!std::isfinite(best[mask])) continue;
    int i = 0;
    while (i < k && ((mask >> i) & 1U)) ++i;
    if (i == k) continue;
    for (int j = i + 1; j < k; ++j) {
      if ((mask >> j) & 1U) continue;
      const std::size_t next = mask | (std::size_t{1} << i) | (std::size_t{1} << j);
      best[next] = std::min(best[next], best[mask] + w(i, j));
    }
  }
  return best[states - 1];
}

/// Shapley value as the average marginal cost over all n! join orders,
/// with coalition costs supplied by `cost` (memoised here).
template <typename CostFn>
std::vector<double> permutation_shapley(int n, CostFn cost) {
  std::map<std::uint64_t, double> memo;
  auto c = [&](std::uint64_t mask) {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    const double v = cost(tsg::Coalition(mask));
    memo.emplace(mask, v);
    return v;
  };
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<double> sv(static_cast<std::size_t>(n), 0.0);
  double count = 0.0;
  do {
    std::uint64_t mask = 0;
    double prev = 0.0;
    for (int i : perm) {
      mask |= std::uint64_t{1} << i;
      const double now = c(mask);
      sv[static_cast<std::size_t>(i - 1)] += now - prev;
      prev = now;
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& x : sv) x /= count;
  return sv;
}

/// Number of adjacent swaps bubble sort needs to order y by the ranking of x.
inline long long bubble_sort_swaps(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> seq;
  for (std::size_t i : idx) seq.push_back(y[i]);
  long long swaps = 0;
  for (std::size_t pass = 0; pass < seq.size(); ++pass) {
    for (std::size_t j = 0; j + 1 < seq.size() - pass; ++j) {
      if (seq[j] > seq[j + 1]) {
        std::swap(seq[j], seq[j + 1]);
        ++swaps;
      }
    }
  }
  return swaps;
}

inline std::vector<double> fractional(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  return v;
}

}  // namespace oracle
