#pragma once

#include <cstdint>
#include <vector>

namespace tsg {

struct Cut {
  /// Vertices on the side that does not contain vertex 0 (bit v = vertex v).
  std::uint64_t side = 0;
  double value = 0.0;
};

/// Stoer-Wagner global minimum cut on a complete graph with symmetric
/// nonnegative weights w[i*k+j] (k <= 64). Returns every cut-of-the-phase in
/// the order found; the minimum is among them. Ties go to the first found.
std::vector<Cut> stoer_wagner_phase_cuts(int k, const std::vector<double>& w);

/// The minimum over stoer_wagner_phase_cuts.
Cut global_min_cut(int k, const std::vector<double>& w);

}  // namespace tsg
