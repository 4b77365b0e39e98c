#pragma once

#include <span>
#include <vector>

namespace tsg {

/// Dense symmetric weight matrix over k vertices, row-major.
struct WeightMatrix {
  int size = 0;
  std::vector<double> w;

  double operator()(int i, int j) const { return w[static_cast<std::size_t>(i) * size + j]; }
};

/// Minimum-weight perfect matching on the complete graph given by `weights`.
///
/// Exact for general (non-bipartite) graphs: Edmonds' blossom algorithm with
/// dual variables, O(k^3). Weights are converted to 64-bit integers with a
/// power-of-two scale that keeps about 40 significant bits, so the optimum is
/// exact for the rounded weights. Returns mate[v] for every vertex.
///
/// Throws Error(kInvalidArgument) for an odd vertex count, non-finite or
/// negative weights, or an asymmetric matrix.
std::vector<int> min_weight_perfect_matching(const WeightMatrix& weights);

/// Sum of w(v, mate[v]) over matched pairs, counted once.
double matching_weight(const WeightMatrix& weights, std::span<const int> mate);

/// Maximum-weight matching on an explicit edge list with integer weights.
/// With `max_cardinality` set, only maximum-cardinality matchings are
/// considered. Returns mate[v] or -1.
struct WeightedEdge {
  int u = 0;
  int v = 0;
  long long weight = 0;
};
std::vector<int> max_weight_matching(int vertex_count, std::span<const WeightedEdge> edges, bool max_cardinality);

}  // namespace tsg
