#include "tsg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsg/error.hpp"

namespace tsg {

namespace {

constexpr double kPriceTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 50;
constexpr int kDegenerateRun = 20;
constexpr std::int64_t kMaxPivots = 200000;

}  // namespace

PackingSimplex::PackingSimplex(std::vector<double> b) : m_(static_cast<int>(b.size())), b_(std::move(b)) {
  for (double v : b_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "right-hand side must be finite and >= 0");
  }
  basis_.resize(static_cast<std::size_t>(m_));
  position_.assign(static_cast<std::size_t>(m_), -1);
  for (int r = 0; r < m_; ++r) {
    basis_[static_cast<std::size_t>(r)] = r;
    position_[static_cast<std::size_t>(r)] = r;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int r = 0; r < m_; ++r) binv_[static_cast<std::size_t>(r) * m_ + r] = 1.0;
  xb_ = b_;
  y_.assign(static_cast<std::size_t>(m_), 0.0);
}

int PackingSimplex::add_column(double cost, std::vector<int> rows) {
  std::sort(rows.begin(), rows.end());
  for (int r : rows) {
    if (r < 0 || r >= m_) throw Error(ErrorKind::kInvalidArgument, "column row index out of range");
  }
  cols_.push_back({cost, std::move(rows)});
  position_.push_back(-1);
  return static_cast<int>(cols_.size()) - 1;
}

void PackingSimplex::column_of(int v, std::vector<double>& out) const {
  out.assign(static_cast<std::size_t>(m_), 0.0);
  if (v < m_) {
    out[static_cast<std::size_t>(v)] = 1.0;
  } else {
    for (int r : cols_[static_cast<std::size_t>(v - m_)].rows) out[static_cast<std::size_t>(r)] = 1.0;
  }
}

void PackingSimplex::refactor() {
  // Gauss-Jordan with partial pivoting on [B | I].
  const std::size_t m = static_cast<std::size_t>(m_);
  std::vector<double> a(m * m, 0.0), col;
  for (std::size_t r = 0; r < m; ++r) {
    column_of(basis_[r], col);
    for (std::size_t i = 0; i < m; ++i) a[i * m + r] = col[i];
  }
  std::vector<double> inv(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < m; ++i) {
      if (std::abs(a[i * m + c]) > std::abs(a[p * m + c])) p = i;
    }
    if (std::abs(a[p * m + c]) < 1e-12) throw Error(ErrorKind::kLpFailure, "singular basis during refactorisation");
    if (p != c) {
      for (std::size_t k = 0; k < m; ++k) {
        std::swap(a[p * m + k], a[c * m + k]);
        std::swap(inv[p * m + k], inv[c * m + k]);
      }
    }
    const double piv = a[c * m + c];
    for (std::size_t k = 0; k < m; ++k) {
      a[c * m + k] /= piv;
      inv[c * m + k] /= piv;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == c) continue;
      const double f = a[i * m + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        a[i * m + k] -= f * a[c * m + k];
        inv[i * m + k] -= f * inv[c * m + k];
      }
    }
  }
  binv_ = std::move(inv);
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += binv_[r * m + k] * b_[k];
    xb_[r] = std::max(s, 0.0);
  }
}

void PackingSimplex::compute_duals() {
  const std::size_t m = static_cast<std::size_t>(m_);
  std::fill(y_.begin(), y_.end(), 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cost_of(basis_[r]);
    if (cb == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k) y_[k] += cb * binv_[r * m + k];
  }
}

double PackingSimplex::reduced_cost(int v) const {
  if (v < m_) return -y_[static_cast<std::size_t>(v)];
  const Column& c = cols_[static_cast<std::size_t>(v - m_)];
  double s = c.cost;
  for (int r : c.rows) s -= y_[static_cast<std::size_t>(r)];
  return s;
}

void PackingSimplex::solve() {
  const std::size_t m = static_cast<std::size_t>(m_);
  const int vars = m_ + columns();
  std::vector<double> a, u(m);
  int since_refactor = 0;
  int degenerate_run = 0;
  for (;;) {
    compute_duals();
    const bool bland = degenerate_run >= kDegenerateRun;
    int enter = -1;
    double best = kPriceTol;
    for (int v = 0; v < vars; ++v) {
      if (position_[static_cast<std::size_t>(v)] >= 0) continue;
      const double rc = reduced_cost(v);
      if (rc > best) {
        enter = v;
        if (bland) break;
        best = rc;
      }
    }
    if (enter < 0) {
      if (since_refactor > 0) {
        // Confirm optimality against a fresh inverse.
        refactor();
        since_refactor = 0;
        continue;
      }
      return;
    }

    column_of(enter, a);
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0.0;
      const double* row = &binv_[r * m];
      for (std::size_t k = 0; k < m; ++k) {
        if (a[k] != 0.0) s += row[k] * a[k];
      }
      u[r] = s;
    }
    int leave = -1;
    double ratio = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (u[r] <= kPivotTol) continue;
      const double t = xb_[r] / u[r];
      const double eps = 1e-12 * std::max(1.0, ratio);
      if (leave < 0 || t < ratio - eps) {
        leave = static_cast<int>(r);
        ratio = t;
      } else if (t <= ratio + eps && basis_[r] < basis_[static_cast<std::size_t>(leave)]) {
        leave = static_cast<int>(r);
        ratio = std::min(ratio, t);
      }
    }
    if (leave < 0) throw Error(ErrorKind::kLpFailure, "LP unbounded after " + std::to_string(pivots_) + " pivots");

    const std::size_t lr = static_cast<std::size_t>(leave);
    const double piv = u[lr];
    double* prow = &binv_[lr * m];
    for (std::size_t k = 0; k < m; ++k) prow[k] /= piv;
    const double step = xb_[lr] / piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == lr || u[r] == 0.0) continue;
      double* row = &binv_[r * m];
      const double f = u[r];
      for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
      xb_[r] = std::max(xb_[r] - f * step, 0.0);
    }
    xb_[lr] = step;
    position_[static_cast<std::size_t>(basis_[lr])] = -1;
    basis_[lr] = enter;
    position_[static_cast<std::size_t>(enter)] = leave;

    degenerate_run = step > 1e-12 ? 0 : degenerate_run + 1;
    ++pivots_;
    if (pivots_ > kMaxPivots) throw Error(ErrorKind::kLpFailure, "simplex pivot limit reached");
    if (++since_refactor >= kRefactorEvery) {
      refactor();
      since_refactor = 0;
    }
  }
}

double PackingSimplex::objective() const {
  double s = 0.0;
  for (std::size_t r = 0; r < static_cast<std::size_t>(m_); ++r) s += cost_of(basis_[r]) * xb_[r];
  return s;
}

double PackingSimplex::value(int j) const {
  const int p = position_[static_cast<std::size_t>(m_ + j)];
  return p < 0 ? 0.0 : xb_[static_cast<std::size_t>(p)];
}

}  // namespace tsg
