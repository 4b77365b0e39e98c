#include "tsg/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsg/error.hpp"
#include "tsg/matching.hpp"

namespace tsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double tour_length(const Instance& inst, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t) total += inst.d(order[t - 1], order[t]);
  return total;
}

HeldKarpTable::HeldKarpTable(const Instance& inst, Coalition members)
    : inst_(&inst), members_(members.members()) {
  const int k = static_cast<int>(members_.size());
  if (k > 30) throw Error(ErrorKind::kCoalitionTooLarge, "Held-Karp table over " + std::to_string(k) + " members");
  const std::uint32_t full = k == 0 ? 0 : static_cast<std::uint32_t>((std::uint64_t{1} << k) - 1);
  const std::size_t states = std::size_t{1} << k;

  offset_.resize(states);
  std::uint64_t running = 0;
  for (std::size_t mask = 0; mask < states; ++mask) {
    offset_[mask] = static_cast<std::uint32_t>(running);
    running += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint32_t>(mask)));
  }
  path_.assign(running, kInf);
  subset_cost_.assign(states, 0.0);

  // Local copies keep the inner loop on contiguous memory.
  std::vector<double> from_depot(k), to_depot(k), local(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    from_depot[a] = inst.d(0, members_[a]);
    to_depot[a] = inst.d(members_[a], 0);
    for (int b = 0; b < k; ++b) local[static_cast<std::size_t>(a) * k + b] = inst.d(members_[a], members_[b]);
  }

  for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
    std::size_t out = offset_[mask];
    double best_total = kInf;
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1, ++out) {
      const int t = std::countr_zero(rest);
      const std::uint32_t prev = mask & ~(std::uint32_t{1} << t);
      double best = kInf;
      if (prev == 0) {
        best = from_depot[t];
      } else {
        const double* prev_paths = &path_[offset_[prev]];
        int rank = 0;
        for (std::uint32_t walk = prev; walk != 0; walk &= walk - 1, ++rank) {
          const int u = std::countr_zero(walk);
          const double candidate = prev_paths[rank] + local[static_cast<std::size_t>(u) * k + t];
          if (candidate < best) best = candidate;
        }
      }
      path_[out] = best;
      const double closed = best + to_depot[t];
      if (closed < best_total) best_total = closed;
    }
    subset_cost_[mask] = best_total;
    if (mask == full) break;
  }
}

std::uint32_t HeldKarpTable::local(Coalition subset) const {
  std::uint32_t mask = 0;
  for (std::size_t t = 0; t < members_.size(); ++t) {
    if (subset.contains(members_[t])) mask |= std::uint32_t{1} << t;
  }
  return mask;
}

double HeldKarpTable::path_cost(Coalition subset, int j) const {
  const std::uint32_t mask = local(subset);
  const auto it = std::find(members_.begin(), members_.end(), j);
  const int t = static_cast<int>(it - members_.begin());
  return path_[slot(mask, t)];
}

Tour HeldKarpTable::tour(Coalition subset) const {
  std::uint32_t mask = local(subset);
  Tour tour;
  if (mask == 0) {
    tour.order = {0, 0};
    return tour;
  }
  // Last location before returning to the depot.
  int last = -1;
  double best = kInf;
  for (std::uint32_t walk = mask; walk != 0; walk &= walk - 1) {
    const int t = std::countr_zero(walk);
    const double v = path_[slot(mask, t)] + inst_->d(members_[t], 0);
    if (v < best) {
      best = v;
      last = t;
    }
  }
  if (last < 0) throw Error(ErrorKind::kInfeasible, "no finite tour over the coalition");
  std::vector<int> reversed{members_[last]};
  int cur = last;
  while (true) {
    const std::uint32_t prev = mask & ~(std::uint32_t{1} << cur);
    if (prev == 0) break;
    int pick = -1;
    double pick_val = kInf;
    for (std::uint32_t walk = prev; walk != 0; walk &= walk - 1) {
      const int u = std::countr_zero(walk);
      const double v = path_[slot(prev, u)] + inst_->d(members_[u], members_[cur]);
      if (v < pick_val) {
        pick_val = v;
        pick = u;
      }
    }
    mask = prev;
    cur = pick;
    reversed.push_back(members_[cur]);
  }
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), reversed.rbegin(), reversed.rend());
  tour.order.push_back(0);
  tour.length = tour_length(*inst_, tour.order);
  return tour;
}

Tour solve_exact(const Instance& inst, Coalition s, const SolverOptions& opts) {
  if (s.size() > opts.exact_limit) {
    throw Error(ErrorKind::kCoalitionTooLarge, "coalition of " + std::to_string(s.size()) +
                                                   " locations exceeds the exact limit of " +
                                                   std::to_string(opts.exact_limit));
  }
  if (s.empty()) return Tour{{0, 0}, 0.0};
  HeldKarpTable table(inst, s);
  if (!std::isfinite(table.cost(s))) throw Error(ErrorKind::kInfeasible, "every tour uses an infinite distance");
  return table.tour(s);
}

Tour solve_christofides(const Instance& inst, Coalition s) {
  std::vector<int> verts{0};
  for (int i : s.members()) verts.push_back(i);
  const int k = static_cast<int>(verts.size());
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double x = inst.d(verts[a], verts[b]);
      if (x != inst.d(verts[b], verts[a])) {
        throw Error(ErrorKind::kAsymmetric, "Christofides needs symmetric distances");
      }
      if (!std::isfinite(x)) throw Error(ErrorKind::kInfeasible, "infinite distance inside the coalition");
    }
  }
  if (k == 1) return Tour{{0, 0}, 0.0};
  auto w = [&](int a, int b) { return inst.d(verts[a], verts[b]); };

  // Prim from the depot.
  std::vector<double> key(k, kInf);
  std::vector<int> parent(k, -1);
  std::vector<bool> in_tree(k, false);
  key[0] = 0.0;
  std::vector<std::pair<int, int>> edges;
  for (int step = 0; step < k; ++step) {
    int pick = -1;
    for (int v = 0; v < k; ++v) {
      if (!in_tree[v] && (pick == -1 || key[v] < key[pick])) pick = v;
    }
    in_tree[pick] = true;
    if (parent[pick] >= 0) edges.emplace_back(parent[pick], pick);
    for (int v = 0; v < k; ++v) {
      if (!in_tree[v] && w(pick, v) < key[v]) {
        key[v] = w(pick, v);
        parent[v] = pick;
      }
    }
  }

  std::vector<int> degree(k, 0);
  for (auto [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  std::vector<int> odd;
  for (int v = 0; v < k; ++v) {
    if (degree[v] % 2 == 1) odd.push_back(v);
  }
  WeightMatrix mw;
  mw.size = static_cast<int>(odd.size());
  mw.w.resize(odd.size() * odd.size());
  for (std::size_t a = 0; a < odd.size(); ++a) {
    for (std::size_t b = 0; b < odd.size(); ++b) mw.w[a * odd.size() + b] = w(odd[a], odd[b]);
  }
  const auto mate = min_weight_perfect_matching(mw);
  for (std::size_t a = 0; a < odd.size(); ++a) {
    if (mate[a] > static_cast<int>(a)) edges.emplace_back(odd[a], odd[static_cast<std::size_t>(mate[a])]);
  }

  // Hierholzer from the depot; lowest neighbour (then lowest edge id) first.
  std::vector<std::vector<std::pair<int, int>>> adj(k);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adj[edges[e].first].emplace_back(edges[e].second, e);
    adj[edges[e].second].emplace_back(edges[e].first, e);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  std::vector<bool> used(edges.size(), false);
  std::vector<std::size_t> next(k, 0);
  std::vector<int> stack{0};
  std::vector<int> circuit;
  while (!stack.empty()) {
    const int v = stack.back();
    while (next[v] < adj[v].size() && used[adj[v][next[v]].second]) ++next[v];
    if (next[v] == adj[v].size()) {
      circuit.push_back(v);
      stack.pop_back();
    } else {
      const auto [u, e] = adj[v][next[v]];
      used[e] = true;
      stack.push_back(u);
    }
  }
  std::reverse(circuit.begin(), circuit.end());

  Tour tour;
  std::vector<bool> seen(k, false);
  for (int v : circuit) {
    if (!seen[v]) {
      seen[v] = true;
      tour.order.push_back(verts[v]);
    }
  }
  tour.order.push_back(0);
  tour.length = tour_length(inst, tour.order);
  return tour;
}

const char* to_string(SolverKind kind) {
  return kind == SolverKind::kExact ? "exact" : "christofides";
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "exact") return SolverKind::kExact;
  if (name == "christofides") return SolverKind::kChristofides;
  throw Error(ErrorKind::kInvalidArgument, "unknown solver '" + name + "'");
}

std::optional<double> CharCache::lookup(Coalition s, SolverKind kind) {
  std::lock_guard lock(mu_);
  const auto& map = maps_[static_cast<int>(kind)];
  if (auto it = map.find(s.mask()); it != map.end()) {
    ++hits_;
    return it->second;
  }
  return std::nullopt;
}

void CharCache::insert(Coalition s, SolverKind kind, double cost) {
  std::lock_guard lock(mu_);
  if (maps_[static_cast<int>(kind)].emplace(s.mask(), cost).second) ++misses_;
}

std::size_t CharCache::size() const {
  std::lock_guard lock(mu_);
  return maps_[0].size() + maps_[1].size();
}

CharacteristicFunction::CharacteristicFunction(const Instance& inst, SolverKind kind, CharCache& cache,
                                               SolverOptions opts)
    : inst_(&inst), kind_(kind), cache_(&cache), opts_(opts), symmetric_(inst.symmetric()) {}

double CharacteristicFunction::travel_cost(Coalition s) {
  if (s.empty()) return 0.0;
  if (s.size() == 1) {
    const int i = std::countr_zero(s.mask());
    return inst_->d(0, i) + inst_->d(i, 0);
  }
  if (auto hit = cache_->lookup(s, kind_)) return *hit;
  const double cost = solve(s);
  cache_->insert(s, kind_, cost);
  return cost;
}

double CharacteristicFunction::solve(Coalition s) {
  if (kind_ == SolverKind::kChristofides) return solve_christofides(*inst_, s).length;
  if (inst_->n() <= opts_.table_limit && inst_->n() <= opts_.exact_limit) {
    std::call_once(table_once_, [&] {
      table_ = std::make_unique<HeldKarpTable>(*inst_, Coalition::all(inst_->n()));
    });
    const double cost = table_->cost(s);
    if (!std::isfinite(cost)) throw Error(ErrorKind::kInfeasible, "every tour uses an infinite distance");
    return cost;
  }
  if (symmetric_ && s.size() > opts_.dp_limit) {
    SolverOptions large = opts_;
    large.exact_limit = opts_.dp_limit;
    return solve_optimal(*inst_, s, large).length;
  }
  return solve_exact(*inst_, s, opts_).length;
}

Tour solve_optimal(const Instance& inst, Coalition s, const SolverOptions& opts) {
  if (s.size() <= opts.exact_limit) return solve_exact(inst, s, opts);
  if (s.size() > opts.branch_limit) {
    throw Error(ErrorKind::kCoalitionTooLarge, "coalition of " + std::to_string(s.size()) +
                                                   " members exceeds the branch limit of " +
                                                   std::to_string(opts.branch_limit));
  }
  return solve_branch_and_bound(inst, s);
}

std::vector<double> CharacteristicFunction::all_travel_costs() {
  const int n = inst_->n();
  if (kind_ == SolverKind::kExact) {
    if (n > opts_.exact_limit) {
      throw Error(ErrorKind::kCoalitionTooLarge, "all-subset table for n=" + std::to_string(n) +
                                                     " exceeds the exact limit of " +
                                                     std::to_string(opts_.exact_limit));
    }
    if (n <= opts_.table_limit) {
      std::call_once(table_once_, [&] { table_ = std::make_unique<HeldKarpTable>(*inst_, Coalition::all(n)); });
      return table_->packed_costs();
    }
    return HeldKarpTable(*inst_, Coalition::all(n)).packed_costs();
  }
  std::vector<double> out(std::size_t{1} << n, 0.0);
  for (std::size_t packed = 1; packed < out.size(); ++packed) {
    out[packed] = travel_cost(Coalition(static_cast<std::uint64_t>(packed) << 1));
  }
  return out;
}

double characteristic(const Instance& inst, Coalition s, SolverKind kind, CharCache& cache,
                      const SolverOptions& opts) {
  // A one-off query should not pay for the all-subset table.
  SolverOptions single = opts;
  single.table_limit = 0;
  return CharacteristicFunction(inst, kind, cache, single)(s);
}

}  // namespace tsg
