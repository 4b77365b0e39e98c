#include "tsg/mincut.hpp"

#include "tsg/error.hpp"

namespace tsg {

std::vector<Cut> stoer_wagner_phase_cuts(int k, const std::vector<double>& w) {
  if (k < 2 || k > 64) throw Error(ErrorKind::kInvalidArgument, "min cut needs between 2 and 64 vertices");
  const std::size_t n = static_cast<std::size_t>(k);
  std::vector<double> g = w;
  // members[v]: original vertices merged into super-vertex v.
  std::vector<std::uint64_t> members(n);
  for (std::size_t v = 0; v < n; ++v) members[v] = std::uint64_t{1} << v;
  std::vector<bool> alive(n, true);
  std::vector<Cut> cuts;

  for (std::size_t phase = 0; phase + 1 < n; ++phase) {
    std::vector<double> key(n, 0.0);
    std::vector<bool> added(n, false);
    std::size_t prev = n, last = n;
    const std::size_t remaining = n - phase;
    for (std::size_t step = 0; step < remaining; ++step) {
      std::size_t pick = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (!alive[v] || added[v]) continue;
        if (pick == n || key[v] > key[pick]) pick = v;
      }
      added[pick] = true;
      prev = last;
      last = pick;
      for (std::size_t v = 0; v < n; ++v) {
        if (alive[v] && !added[v]) key[v] += g[pick * n + v];
      }
    }
    Cut c;
    c.value = key[last];
    c.side = members[last];
    if (c.side & 1U) {
      std::uint64_t everyone = 0;
      for (std::size_t v = 0; v < n; ++v) everyone |= std::uint64_t{1} << v;
      c.side = everyone & ~c.side;
    }
    cuts.push_back(c);
    // Merge last into prev.
    members[prev] |= members[last];
    alive[last] = false;
    for (std::size_t v = 0; v < n; ++v) {
      g[prev * n + v] += g[last * n + v];
      g[v * n + prev] = g[prev * n + v];
    }
    g[prev * n + prev] = 0.0;
  }
  return cuts;
}

Cut global_min_cut(int k, const std::vector<double>& w) {
  const auto cuts = stoer_wagner_phase_cuts(k, w);
  Cut best = cuts.front();
  for (const Cut& c : cuts) {
    if (c.value < best.value) best = c;
  }
  return best;
}

}  // namespace tsg
