#include "tsg/shapley.hpp"

#include <cmath>
#include <numeric>

#include "tsg/error.hpp"
#include "tsg/rng.hpp"

namespace tsg {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

void require_iterations(std::int64_t m) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "iteration count must be at least 1");
}

// Scales the sampled estimates so they sum to c(N).
Allocation finish_sampled(CharacteristicFunction& c, std::vector<double> raw, const char* method,
                          std::int64_t m, std::uint64_t seed) {
  const Instance& inst = c.instance();
  const double grand = c(Coalition::all(inst.n()));
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  Allocation a;
  a.method = method;
  a.instance_id = inst.id();
  a.seed = seed;
  a.iterations = m;
  a.total_cost = grand;
  a.absolute = raw;
  if (total != 0.0) {
    for (double& x : a.absolute) x *= grand / total;
  } else {
    a.warnings.push_back("sampled estimates sum to zero; rescale skipped");
  }
  a.raw = std::move(raw);
  if (grand > 0.0) a = fractionalize(std::move(a));
  return a;
}

}  // namespace

double shapley_weight(int n, int s) {
  // |S|!(n-|S|-1)!/n! = 1/(n C(n-1, s)); C(n-1, s) is exact in a double up
  // to n = 57, and the reciprocal stays far from underflow for n <= 62.
  return 1.0 / (n * binomial(n - 1, s));
}

Allocation exact_shapley(CharacteristicFunction& c, int max_n) {
  const Instance& inst = c.instance();
  const int n = inst.n();
  if (n > max_n) {
    throw Error(ErrorKind::kCoalitionTooLarge,
                "exact Shapley for n=" + std::to_string(n) + " exceeds the limit of " + std::to_string(max_n));
  }
  std::vector<double> cost = c.all_travel_costs();
  const std::size_t states = cost.size();
  // Fixed costs go through the same table so c'(S) is what gets enumerated.
  if (inst.fixed_costs()) {
    std::vector<double> fixed(states, 0.0);
    for (std::size_t packed = 1; packed < states; ++packed) {
      const int low = std::countr_zero(packed);
      fixed[packed] = fixed[packed & (packed - 1)] + inst.fixed_cost(low + 1);
    }
    for (std::size_t packed = 0; packed < states; ++packed) cost[packed] += fixed[packed];
  }
  if (!std::isfinite(cost[states - 1])) throw Error(ErrorKind::kInfeasible, "grand coalition has no finite tour");

  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) weight[static_cast<std::size_t>(s)] = shapley_weight(n, s);

  std::vector<double> sv(static_cast<std::size_t>(n), 0.0);
  for (std::size_t packed = 0; packed + 1 < states; ++packed) {
    const double w = weight[static_cast<std::size_t>(std::popcount(packed))];
    for (int t = 0; t < n; ++t) {
      const std::size_t bit = std::size_t{1} << t;
      if (packed & bit) continue;
      sv[static_cast<std::size_t>(t)] += w * (cost[packed | bit] - cost[packed]);
    }
  }

  Allocation a;
  a.method = "exact";
  a.instance_id = inst.id();
  a.total_cost = cost[states - 1];
  a.absolute = std::move(sv);
  if (cost[states - 1] > 0.0) a = fractionalize(std::move(a));
  return a;
}

Allocation appro_shapley(CharacteristicFunction& c, std::int64_t m, std::uint64_t seed) {
  require_iterations(m);
  const int n = c.instance().n();
  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t it = 0; it < m; ++it) {
    std::iota(perm.begin(), perm.end(), 1);
    rng.shuffle(std::span<int>(perm));
    Coalition s;
    double prev = 0.0;
    for (int i : perm) {
      s = s.with(i);
      const double now = c(s);
      sum[static_cast<std::size_t>(i - 1)] += now - prev;
      prev = now;
    }
  }
  for (double& x : sum) x /= static_cast<double>(m);
  return finish_sampled(c, std::move(sum), "appro", m, seed);
}

Allocation subset_shapley(CharacteristicFunction& c, std::int64_t m, std::uint64_t seed) {
  require_iterations(m);
  const int n = c.instance().n();
  Rng rng(seed);
  // 2^(n-1) |S|!(n-|S|-1)!/n!: the Eq. 1 weight over the uniform subset density.
  std::vector<double> scale(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) scale[static_cast<std::size_t>(s)] = std::ldexp(shapley_weight(n, s), n - 1);
  const std::uint64_t everyone = Coalition::all(n).mask();
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t it = 0; it < m; ++it) {
    for (int i = 1; i <= n; ++i) {
      const Coalition s(rng.next() & everyone & ~(std::uint64_t{1} << i));
      const double margin = c(s.with(i)) - c(s);
      sum[static_cast<std::size_t>(i - 1)] += scale[static_cast<std::size_t>(s.size())] * margin;
    }
  }
  for (double& x : sum) x /= static_cast<double>(m);
  return finish_sampled(c, std::move(sum), "subset", m, seed);
}

}  // namespace tsg
