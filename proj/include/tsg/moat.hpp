#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsg/allocation.hpp"
#include "tsg/instance.hpp"

namespace tsg {

/// One moat: the cut between `set` and the rest of {0..n}, crossed by the
/// tour at least twice. Every cut has exactly one side without the depot and
/// that side is what gets stored, so sets are nonempty subsets of 1..n.
struct Moat {
  Coalition set;
  double width = 0.0;
};

struct MoatPacking {
  std::vector<Moat> moats;  // sorted by set mask
  /// 2 * sum of widths (distance units).
  double objective = 0.0;
  /// Cutting-plane rounds and simplex pivots used by solve_packing.
  int rounds = 0;
  std::int64_t pivots = 0;
  /// Optimal LP duals: the fractional tour x_ij, indexed like
  /// pair_index(i, j). Together with the widths this certifies optimality.
  std::vector<double> tour_fraction;
  /// Uncrossing steps applied by nest().
  std::int64_t nest_steps = 0;
  /// Set when the least-norm selection fell back to a simplex vertex.
  std::vector<std::string> warnings;
};

/// Position of the pair i < j among the (n+1)n/2 pair constraints.
inline int pair_index(int i, int j, int vertex_count) { return i * vertex_count - i * (i + 1) / 2 + (j - i - 1); }

/// Optimal moat packing: max 2 sum w_S subject to, for every pair i,j of
/// {0..n}, the widths of moats separating i and j summing to at most d_ij.
/// Its value is the Held-Karp lower bound. Solved by column generation:
/// the restricted packing LP is re-solved after adding every cut whose dual
/// (fractional tour) weight is below 2, found by global minimum cut.
///
/// The LP optimum is rarely unique, so the packing returned is the optimal
/// one of least Euclidean norm: max sum w - |w|^2 / (2 kappa) has exactly
/// that solution once kappa is large enough, and kappa is raised until the
/// packing value matches the LP value. This makes the result independent of
/// how locations are numbered.
/// Throws kAsymmetric, kInvalidArgument (infinite distances) or kLpFailure.
MoatPacking solve_packing(const Instance& inst);

/// Largest excess of any pair constraint over d_ij (<= 0 when feasible).
double packing_violation(const MoatPacking& p, const Instance& inst);

/// True when no two moats cross (each pair is disjoint or nested).
bool is_nested(const MoatPacking& p);

/// Removes crossings: for crossing A, B with tau = min(w_A, w_B), both lose
/// tau and A\B, B\A each gain tau. The objective is unchanged. Feasibility is
/// re-checked after every step against `inst` when given. Throws
/// kNestingFailure after 10^6 steps or on a feasibility violation.
MoatPacking nest(MoatPacking p, const Instance* inst = nullptr);

/// Each moat's 3 w_S is split evenly over the locations inside it. The
/// result sums to 1.5 times the packing objective. Method tag "moat".
Allocation moat_allocation(const MoatPacking& p, const Instance& inst);

std::string packing_to_json_text(const MoatPacking& p);

}  // namespace tsg
