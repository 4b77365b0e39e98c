#pragma once

#include <cstdint>

#include "tsg/allocation.hpp"
#include "tsg/tsp.hpp"

namespace tsg {

/// Default largest n for exact Shapley; above this the 2^n enumeration is
/// impractical for routine use.
inline constexpr int kExactShapleyLimit = 15;

/// Exact Shapley value: one pass over all 2^n coalitions with the weights
/// |S|!(n-|S|-1)!/n!, reading c(S) from a single all-subset table. Method
/// tag "exact". Throws kCoalitionTooLarge when n exceeds `max_n`.
Allocation exact_shapley(CharacteristicFunction& c, int max_n = kExactShapleyLimit);

/// ApproShapley: average marginal cost over m uniform random join orders,
/// then a final rescale by c(N)/total. `raw` keeps the unscaled averages.
/// Method tag "appro".
Allocation appro_shapley(CharacteristicFunction& c, std::int64_t m, std::uint64_t seed);

/// Subset sampling: each iteration draws, for every location i, a uniform
/// random S from the subsets of N\{i} and adds the weighted margin
/// c(S+i)-c(S). Same final rescale as appro_shapley. Method tag "subset".
Allocation subset_shapley(CharacteristicFunction& c, std::int64_t m, std::uint64_t seed);

/// |S|!(n-|S|-1)!/n! for |S| = s.
double shapley_weight(int n, int s);

}  // namespace tsg
