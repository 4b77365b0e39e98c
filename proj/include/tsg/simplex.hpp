#pragma once

#include <cstdint>
#include <vector>

namespace tsg {

/// max c'x  s.t.  A x <= b,  x >= 0, with b >= 0 so the slack basis is
/// feasible from the start. Columns may be appended between solves and the
/// previous basis is kept (warm start).
///
/// Revised simplex with a dense basis inverse. Entering variable by largest
/// reduced cost (lowest index on ties); after a run of degenerate pivots it
/// switches to Bland's rule until the objective moves again. The leaving row
/// is the minimum ratio, ties to the lowest variable index.
class PackingSimplex {
 public:
  explicit PackingSimplex(std::vector<double> b);

  /// Appends a structural column; `rows` lists the rows holding a 1.
  int add_column(double cost, std::vector<int> rows);

  /// Solves to optimality. Throws Error(kLpFailure) on an iteration limit or
  /// numerical breakdown.
  void solve();

  int rows() const { return m_; }
  int columns() const { return static_cast<int>(cols_.size()); }
  double objective() const;
  /// Value of structural column j.
  double value(int j) const;
  /// Row duals (one per constraint); nonnegative at the optimum.
  const std::vector<double>& duals() const { return y_; }
  std::int64_t pivots() const { return pivots_; }

 private:
  struct Column {
    double cost;
    std::vector<int> rows;
  };
  // Variable v < m_ is the slack of row v; v >= m_ is column v - m_.
  double cost_of(int v) const { return v < m_ ? 0.0 : cols_[static_cast<std::size_t>(v - m_)].cost; }
  void column_of(int v, std::vector<double>& out) const;
  void refactor();
  void compute_duals();
  double reduced_cost(int v) const;

  int m_;
  std::vector<double> b_;
  std::vector<Column> cols_;
  std::vector<int> basis_;     // basic variable per row
  std::vector<int> position_;  // row of a basic variable, or -1
  std::vector<double> binv_;   // m x m, row-major
  std::vector<double> xb_;
  std::vector<double> y_;
  std::int64_t pivots_ = 0;
};

}  // namespace tsg
