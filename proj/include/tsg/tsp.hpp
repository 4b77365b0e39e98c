#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "tsg/instance.hpp"

namespace tsg {

/// A closed walk that starts and ends at the depot.
struct Tour {
  std::vector<int> order;  // 0, ..., 0
  double length = 0.0;
};

/// Sum of consecutive distances along `order`, accumulated from the depot.
double tour_length(const Instance& inst, const std::vector<int>& order);

/// Bellman/Held-Karp table over the members of one coalition.
///
/// For every subset T of the members and every endpoint j in T it stores the
/// shortest depot-to-j path through all of T, plus c(T) for every T. Path
/// entries are packed (only j in T), so memory is |S| 2^(|S|-1) doubles.
/// Ties between equal-cost predecessors go to the lowest location index.
class HeldKarpTable {
 public:
  HeldKarpTable(const Instance& inst, Coalition members);

  /// c(T) for any T contained in the members.
  double cost(Coalition subset) const { return subset_cost_[local(subset)]; }

  /// Optimal tour for any T contained in the members; its length is
  /// bit-identical to cost(T).
  Tour tour(Coalition subset) const;

  /// Shortest depot-to-j path through all of T (j must be in T).
  double path_cost(Coalition subset, int j) const;

  /// c(T) indexed by the packed member mask (bit t = t-th smallest member).
  const std::vector<double>& packed_costs() const { return subset_cost_; }

  const std::vector<int>& members() const { return members_; }

 private:
  std::uint32_t local(Coalition subset) const;
  std::size_t slot(std::uint32_t mask, int t) const {
    return offset_[mask] + static_cast<std::size_t>(std::popcount(mask & ((std::uint32_t{1} << t) - 1)));
  }

  const Instance* inst_;
  std::vector<int> members_;
  std::vector<std::uint32_t> offset_;
  std::vector<double> path_;
  std::vector<double> subset_cost_;
};

struct SolverOptions {
  /// Largest coalition the exact solver accepts.
  int exact_limit = 24;
  /// Instances with n at or below this get one Held-Karp table over all
  /// locations, which then answers every exact characteristic query.
  int table_limit = 20;
  /// Per-coalition exact queries above this size use branch and bound when
  /// distances are symmetric; Held-Karp is faster below it.
  int dp_limit = 12;
  /// Largest coalition the exact characteristic function accepts.
  int branch_limit = 40;
};

/// Minimum-length tour over the coalition (Held-Karp). Throws
/// kCoalitionTooLarge above the exact limit and kInfeasible when every
/// route uses an infinite distance.
Tour solve_exact(const Instance& inst, Coalition s, const SolverOptions& opts = {});

/// Minimum-length tour by branch and bound on the Lagrangian 1-tree bound,
/// for symmetric coalitions too large for Held-Karp. Optimal to a relative
/// gap of 1e-10. Throws kAsymmetric, kInfeasible, or kCoalitionTooLarge when
/// the node budget is exhausted.
Tour solve_branch_and_bound(const Instance& inst, Coalition s);

/// Held-Karp up to the exact limit, branch and bound above it up to the
/// branch limit.
Tour solve_optimal(const Instance& inst, Coalition s, const SolverOptions& opts = {});

/// Christofides heuristic over the coalition: Prim MST rooted at the depot,
/// exact minimum-weight matching of odd-degree vertices, Hierholzer circuit
/// from the depot, then shortcutting. Deterministic; ties go to the lowest
/// index. Throws kAsymmetric or kInfeasible.
Tour solve_christofides(const Instance& inst, Coalition s);

enum class SolverKind { kExact = 0, kChristofides = 1 };
const char* to_string(SolverKind kind);
SolverKind solver_from_string(const std::string& name);

/// Memo of travel costs keyed by (coalition, solver kind). Thread-safe; a
/// value, once inserted, never changes.
class CharCache {
 public:
  std::optional<double> lookup(Coalition s, SolverKind kind);
  void insert(Coalition s, SolverKind kind, double cost);

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, double> maps_[2];
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

/// The characteristic function c(S) of one instance under one solver.
///
/// c(empty) = 0 and c({i}) = d_0i + d_i0 are answered directly; everything
/// else goes through the cache. Fixed costs are added on top of the cached
/// travel cost, so cache entries are shared across fixed-cost variants.
class CharacteristicFunction {
 public:
  CharacteristicFunction(const Instance& inst, SolverKind kind, CharCache& cache, SolverOptions opts = {});

  /// Travel cost plus the fixed costs of the members.
  double operator()(Coalition s) { return travel_cost(s) + inst_->fixed_cost(s); }

  double travel_cost(Coalition s);

  /// Travel cost of every subset of {1..n}, indexed by mask >> 1.
  /// Exact: one Held-Karp table; Christofides: one heuristic run per subset.
  std::vector<double> all_travel_costs();

  const Instance& instance() const { return *inst_; }
  SolverKind kind() const { return kind_; }
  CharCache& cache() { return *cache_; }

 private:
  double solve(Coalition s);

  const Instance* inst_;
  SolverKind kind_;
  CharCache* cache_;
  SolverOptions opts_;
  bool symmetric_;
  std::once_flag table_once_;
  std::unique_ptr<HeldKarpTable> table_;
};

/// One-shot characteristic query.
double characteristic(const Instance& inst, Coalition s, SolverKind kind, CharCache& cache,
                      const SolverOptions& opts = {});

}  // namespace tsg
