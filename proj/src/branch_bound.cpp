#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tsg/error.hpp"
#include "tsg/tsp.hpp"

namespace tsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxNodes = 5'000'000;

enum : signed char { kFree = 0, kIn = 1, kOut = -1 };

// Local problem on vertices 0..v-1 with 0 the depot.
struct Problem {
  int v = 0;
  std::vector<double> cost;
  double c(int a, int b) const { return cost[static_cast<std::size_t>(a) * static_cast<std::size_t>(v) + b]; }
};

struct State {
  std::vector<signed char> edge;  // v*v, symmetric
  std::vector<double> pi;
};

struct OneTree {
  bool feasible = false;
  double bound = 0.0;
  std::vector<int> degree;
  std::vector<std::pair<int, int>> edges;
};

signed char& at(State& s, int v, int a, int b) { return s.edge[static_cast<std::size_t>(a) * v + b]; }
signed char get(const State& s, int v, int a, int b) { return s.edge[static_cast<std::size_t>(a) * v + b]; }

void set_edge(State& s, int v, int a, int b, signed char x) {
  at(s, v, a, b) = x;
  at(s, v, b, a) = x;
}

// Minimum 1-tree under cost + pi_a + pi_b: spanning tree on 1..v-1 plus the
// two cheapest depot edges, honouring forced and excluded edges.
OneTree one_tree(const Problem& p, const State& s) {
  const int v = p.v;
  OneTree t;
  t.degree.assign(static_cast<std::size_t>(v), 0);
  double scale = 0.0;
  for (double x : p.cost) scale = std::max(scale, std::abs(x));
  for (double x : s.pi) scale += std::abs(x);
  const double forced_bonus = 4.0 * scale + 1.0;
  auto w = [&](int a, int b) { return p.c(a, b) + s.pi[static_cast<std::size_t>(a)] + s.pi[static_cast<std::size_t>(b)]; };
  auto key_of = [&](int a, int b) {
    const signed char e = get(s, v, a, b);
    if (e == kOut) return kInf;
    return e == kIn ? w(a, b) - forced_bonus : w(a, b);
  };

  // Prim over 1..v-1.
  std::vector<double> key(static_cast<std::size_t>(v), kInf);
  std::vector<int> parent(static_cast<std::size_t>(v), -1);
  std::vector<char> done(static_cast<std::size_t>(v), 0);
  key[1] = 0.0;
  double total = 0.0;
  for (int step = 1; step < v; ++step) {
    int pick = -1;
    for (int a = 1; a < v; ++a) {
      if (!done[a] && (pick == -1 || key[a] < key[pick])) pick = a;
    }
    if (!std::isfinite(key[pick])) return t;
    done[pick] = 1;
    if (parent[pick] >= 0) {
      t.edges.emplace_back(parent[pick], pick);
      total += w(parent[pick], pick);
      ++t.degree[pick];
      ++t.degree[parent[pick]];
    }
    for (int a = 1; a < v; ++a) {
      if (done[a]) continue;
      const double k = key_of(pick, a);
      if (k < key[a]) {
        key[a] = k;
        parent[a] = pick;
      }
    }
  }
  // Every forced edge away from the depot must be in the tree.
  for (int a = 1; a < v; ++a) {
    for (int b = a + 1; b < v; ++b) {
      if (get(s, v, a, b) != kIn) continue;
      if (parent[a] != b && parent[b] != a) return t;
    }
  }
  // Depot edges: forced first, then cheapest free.
  std::vector<int> picks;
  for (int a = 1; a < v; ++a) {
    if (get(s, v, 0, a) == kIn) picks.push_back(a);
  }
  if (picks.size() > 2) return t;
  while (picks.size() < 2) {
    int best = -1;
    for (int a = 1; a < v; ++a) {
      if (get(s, v, 0, a) != kFree || std::find(picks.begin(), picks.end(), a) != picks.end()) continue;
      if (best == -1 || w(0, a) < w(0, best)) best = a;
    }
    if (best == -1 || !std::isfinite(w(0, best))) return t;
    picks.push_back(best);
  }
  for (int a : picks) {
    t.edges.emplace_back(0, a);
    total += w(0, a);
    ++t.degree[0];
    ++t.degree[a];
  }
  double pi_sum = 0.0;
  for (double x : s.pi) pi_sum += x;
  t.bound = total - 2.0 * pi_sum;
  t.feasible = true;
  return t;
}

bool is_tour(const OneTree& t) {
  return std::all_of(t.degree.begin(), t.degree.end(), [](int d) { return d == 2; });
}

// Forces implied by degree limits; false when the state admits no tour.
bool propagate(State& s, int v) {
  for (bool changed = true; changed;) {
    changed = false;
    for (int a = 0; a < v; ++a) {
      int in = 0, free = 0;
      for (int b = 0; b < v; ++b) {
        if (b == a) continue;
        const signed char e = get(s, v, a, b);
        in += e == kIn;
        free += e == kFree;
      }
      if (in > 2 || in + free < 2) return false;
      if (in == 2 && free > 0) {
        for (int b = 0; b < v; ++b) {
          if (b != a && get(s, v, a, b) == kFree) set_edge(s, v, a, b, kOut);
        }
        changed = true;
      } else if (in + free == 2 && free > 0) {
        for (int b = 0; b < v; ++b) {
          if (b != a && get(s, v, a, b) == kFree) set_edge(s, v, a, b, kIn);
        }
        changed = true;
      }
    }
    // Forced edges must form paths, or one Hamiltonian cycle; an edge that
    // would close a shorter cycle is excluded.
    std::vector<int> comp(static_cast<std::size_t>(v));
    for (int a = 0; a < v; ++a) comp[a] = a;
    auto find = [&](int a) {
      while (comp[a] != a) a = comp[a] = comp[comp[a]];
      return a;
    };
    int forced = 0;
    for (int a = 0; a < v; ++a) {
      for (int b = a + 1; b < v; ++b) {
        if (get(s, v, a, b) != kIn) continue;
        ++forced;
        const int ra = find(a), rb = find(b);
        if (ra == rb && forced < v) return false;
        comp[ra] = rb;
      }
    }
    if (forced < v - 1) {
      for (int a = 0; a < v; ++a) {
        for (int b = a + 1; b < v; ++b) {
          if (get(s, v, a, b) == kFree && find(a) == find(b)) {
            set_edge(s, v, a, b, kOut);
            changed = true;
          }
        }
      }
    }
  }
  return true;
}

// Subgradient ascent on pi; leaves the best pi in the state.
OneTree ascend(const Problem& p, State& s, double upper, int iterations) {
  OneTree best = one_tree(p, s);
  if (!best.feasible || is_tour(best)) return best;
  std::vector<double> best_pi = s.pi;
  double alpha = 2.0;
  int stall = 0;
  OneTree cur = best;
  for (int it = 0; it < iterations && alpha > 1e-4; ++it) {
    double norm = 0.0;
    for (int d : cur.degree) norm += static_cast<double>((d - 2) * (d - 2));
    if (norm == 0.0) break;
    const double gap = std::isfinite(upper) ? upper - cur.bound : std::abs(cur.bound) * 0.01 + 1.0;
    const double step = alpha * std::max(gap, 1e-12 * std::abs(upper)) / norm;
    for (int a = 0; a < p.v; ++a) s.pi[static_cast<std::size_t>(a)] += step * (cur.degree[a] - 2);
    cur = one_tree(p, s);
    if (!cur.feasible) break;
    if (cur.bound > best.bound + 1e-12 * std::abs(best.bound)) {
      best = cur;
      best_pi = s.pi;
      stall = 0;
    } else if (++stall >= std::max(5, p.v / 2)) {
      alpha *= 0.5;
      stall = 0;
    }
    if (is_tour(cur) || cur.bound >= upper) {
      best = cur;
      best_pi = s.pi;
      break;
    }
  }
  s.pi = best_pi;
  return best;
}

std::vector<int> tour_from_tree(const OneTree& t, int v) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(v));
  for (auto [a, b] : t.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> order{0};
  int prev = 0, cur = std::min(adj[0][0], adj[0][1]);
  while (cur != 0) {
    order.push_back(cur);
    const int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
    prev = cur;
    cur = next;
  }
  order.push_back(0);
  return order;
}

double local_length(const Problem& p, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += p.c(order[i - 1], order[i]);
  return total;
}

void two_opt(const Problem& p, std::vector<int>& order) {
  const int m = static_cast<int>(order.size());
  for (bool improved = true; improved;) {
    improved = false;
    for (int i = 1; i + 1 < m; ++i) {
      for (int j = i + 1; j + 1 < m; ++j) {
        const double delta = p.c(order[i - 1], order[j]) + p.c(order[i], order[j + 1]) -
                             p.c(order[i - 1], order[i]) - p.c(order[j], order[j + 1]);
        if (delta < -1e-12 * (p.c(order[i - 1], order[i]) + p.c(order[j], order[j + 1]))) {
          std::reverse(order.begin() + i, order.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
}

struct Search {
  const Problem& p;
  double upper = kInf;
  std::vector<int> best;
  std::int64_t nodes = 0;

  void offer(const std::vector<int>& order) {
    const double len = local_length(p, order);
    if (len < upper) {
      upper = len;
      best = order;
    }
  }

  bool prune(double bound) const { return bound >= upper - 1e-10 * upper; }

  void dfs(State s, OneTree t) {
    if (++nodes > kMaxNodes) {
      throw Error(ErrorKind::kCoalitionTooLarge, "branch and bound exceeded its node limit");
    }
    if (!t.feasible || prune(t.bound)) return;
    if (is_tour(t)) {
      offer(tour_from_tree(t, p.v));
      return;
    }
    const int v = p.v;
    // Branch at the highest-degree vertex on its free tree edges.
    int pick = 0;
    for (int a = 1; a < v; ++a) {
      if (t.degree[a] > t.degree[pick]) pick = a;
    }
    std::vector<int> free_nb;
    int forced = 0;
    for (auto [a, b] : t.edges) {
      const int other = a == pick ? b : (b == pick ? a : -1);
      if (other < 0) continue;
      if (get(s, v, pick, other) == kIn) {
        ++forced;
      } else {
        free_nb.push_back(other);
      }
    }
    auto wp = [&](int o) { return p.c(pick, o) + s.pi[static_cast<std::size_t>(o)]; };
    std::sort(free_nb.begin(), free_nb.end(), [&](int x, int y) { return wp(x) < wp(y) || (wp(x) == wp(y) && x < y); });

    std::vector<State> kids;
    if (forced == 0 && free_nb.size() >= 2) {
      State a = s;
      set_edge(a, v, pick, free_nb[0], kOut);
      kids.push_back(std::move(a));
      State b = s;
      set_edge(b, v, pick, free_nb[0], kIn);
      set_edge(b, v, pick, free_nb[1], kOut);
      kids.push_back(std::move(b));
      State c = s;
      set_edge(c, v, pick, free_nb[0], kIn);
      set_edge(c, v, pick, free_nb[1], kIn);
      kids.push_back(std::move(c));
    } else if (!free_nb.empty()) {
      State a = s;
      set_edge(a, v, pick, free_nb[0], kOut);
      kids.push_back(std::move(a));
      State b = s;
      set_edge(b, v, pick, free_nb[0], kIn);
      kids.push_back(std::move(b));
    } else {
      throw Error(ErrorKind::kInfeasible, "branch and bound found no edge to branch on");
    }
    std::vector<std::pair<double, std::size_t>> order;
    std::vector<OneTree> trees(kids.size());
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (!propagate(kids[k], v)) continue;
      trees[k] = ascend(p, kids[k], upper, 2 * v);
      if (trees[k].feasible) order.emplace_back(trees[k].bound, k);
    }
    std::sort(order.begin(), order.end());
    for (auto [bound, k] : order) {
      if (prune(bound)) continue;
      dfs(std::move(kids[k]), std::move(trees[k]));
    }
  }
};

}  // namespace

Tour solve_branch_and_bound(const Instance& inst, Coalition s) {
  std::vector<int> verts{0};
  for (int i : s.members()) verts.push_back(i);
  const int v = static_cast<int>(verts.size());
  if (v == 1) return Tour{{0, 0}, 0.0};
  if (v <= 3) {
    std::vector<int> order(verts);
    order.push_back(0);
    return Tour{order, tour_length(inst, order)};
  }
  Problem p;
  p.v = v;
  p.cost.resize(static_cast<std::size_t>(v) * v);
  for (int a = 0; a < v; ++a) {
    for (int b = 0; b < v; ++b) {
      const double x = inst.d(verts[a], verts[b]);
      if (x != inst.d(verts[b], verts[a])) throw Error(ErrorKind::kAsymmetric, "branch and bound needs symmetric distances");
      if (!std::isfinite(x)) throw Error(ErrorKind::kInfeasible, "infinite distance inside the coalition");
      p.cost[static_cast<std::size_t>(a) * v + b] = x;
    }
  }

  Search search{p, kInf, {}, 0};
  // Start from Christofides improved by 2-opt.
  const Tour start = solve_christofides(inst, s);
  std::vector<int> order;
  for (int g : start.order) order.push_back(static_cast<int>(std::find(verts.begin(), verts.end(), g) - verts.begin()));
  two_opt(p, order);
  search.offer(order);

  State root;
  root.edge.assign(static_cast<std::size_t>(v) * v, kFree);
  root.pi.assign(static_cast<std::size_t>(v), 0.0);
  for (int a = 0; a < v; ++a) at(root, v, a, a) = kOut;
  const OneTree t = ascend(p, root, search.upper, 50 * v);
  search.dfs(std::move(root), t);

  Tour tour;
  for (int a : search.best) tour.order.push_back(verts[static_cast<std::size_t>(a)]);
  tour.length = tour_length(inst, tour.order);
  return tour;
}

}  // namespace tsg
