#include "tsg/qp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tsg/error.hpp"

namespace tsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Solver {
  int n;
  std::vector<double> j;  // n x n, row-major: J[r][c]
  std::vector<double> r;  // n x n upper triangular
  double r_norm = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();

  double& J(int row, int col) { return j[static_cast<std::size_t>(row) * n + col]; }
  double& R(int row, int col) { return r[static_cast<std::size_t>(row) * n + col]; }

  bool add_constraint(std::vector<double>& d, int& iq) {
    for (int c = n - 1; c >= iq + 1; --c) {
      double cc = d[static_cast<std::size_t>(c - 1)];
      double ss = d[static_cast<std::size_t>(c)];
      const double h = std::hypot(cc, ss);
      if (std::abs(h) < eps) continue;
      d[static_cast<std::size_t>(c)] = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d[static_cast<std::size_t>(c - 1)] = -h;
      } else {
        d[static_cast<std::size_t>(c - 1)] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, c - 1), t2 = J(k, c);
        J(k, c - 1) = t1 * cc + t2 * ss;
        J(k, c) = xny * (t1 + J(k, c - 1)) - t2;
      }
    }
    ++iq;
    for (int i = 0; i < iq; ++i) R(i, iq - 1) = d[static_cast<std::size_t>(i)];
    if (std::abs(d[static_cast<std::size_t>(iq - 1)]) <= eps * r_norm) return false;
    r_norm = std::max(r_norm, std::abs(d[static_cast<std::size_t>(iq - 1)]));
    return true;
  }

  void delete_constraint(std::vector<int>& active, std::vector<double>& u, int& iq, int l) {
    int qq = -1;
    for (int i = 0; i < iq; ++i) {
      if (active[static_cast<std::size_t>(i)] == l) {
        qq = i;
        break;
      }
    }
    if (qq < 0) throw Error(ErrorKind::kLpFailure, "QP: dropping a constraint that is not active");
    for (int i = qq; i < iq - 1; ++i) {
      active[static_cast<std::size_t>(i)] = active[static_cast<std::size_t>(i + 1)];
      u[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i + 1)];
      for (int k = 0; k < n; ++k) R(k, i) = R(k, i + 1);
    }
    active[static_cast<std::size_t>(iq - 1)] = active[static_cast<std::size_t>(iq)];
    u[static_cast<std::size_t>(iq - 1)] = u[static_cast<std::size_t>(iq)];
    active[static_cast<std::size_t>(iq)] = -1;
    u[static_cast<std::size_t>(iq)] = 0.0;
    for (int k = 0; k < iq; ++k) R(k, iq - 1) = 0.0;
    --iq;
    if (iq == 0) return;
    for (int c = qq; c < iq; ++c) {
      double cc = R(c, c), ss = R(c + 1, c);
      const double h = std::hypot(cc, ss);
      if (std::abs(h) < eps) continue;
      cc /= h;
      ss /= h;
      R(c + 1, c) = 0.0;
      if (cc < 0.0) {
        R(c, c) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R(c, c) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = c + 1; k < iq; ++k) {
        const double t1 = R(c, k), t2 = R(c + 1, k);
        R(c, k) = t1 * cc + t2 * ss;
        R(c + 1, k) = xny * (t1 + R(c, k)) - t2;
      }
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, c), t2 = J(k, c + 1);
        J(k, c) = t1 * cc + t2 * ss;
        J(k, c + 1) = xny * (J(k, c) + t1) - t2;
      }
    }
  }
};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

QpResult identity_qp(const std::vector<double>& a, const std::vector<std::vector<double>>& c,
                     const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != m) throw Error(ErrorKind::kDimensionMismatch, "QP: rows and bounds differ");
  // Internally the rows are ci'x + ci0 >= 0 with ci = -c, ci0 = b.
  auto slack = [&](int i, const std::vector<double>& x) { return b[static_cast<std::size_t>(i)] - dot(c[static_cast<std::size_t>(i)], x); };

  Solver s{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0), std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i) s.J(i, i) = 1.0;

  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -a[static_cast<std::size_t>(i)];

  std::vector<int> active(static_cast<std::size_t>(n) + 1, -1);
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<bool> is_active(static_cast<std::size_t>(m), false), excluded(static_cast<std::size_t>(m), false);
  std::vector<double> d(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n)), rr(static_cast<std::size_t>(n) + 1),
      np(static_cast<std::size_t>(n)), sv(static_cast<std::size_t>(m));
  int iq = 0;
  QpResult out;

  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double feas_tol = 1e-12 * scale;
  const int max_iter = 50 * (n + m) + 1000;

  for (;;) {
    if (++out.iterations > max_iter) throw Error(ErrorKind::kLpFailure, "QP: iteration limit reached");
    for (int i = 0; i < m; ++i) sv[static_cast<std::size_t>(i)] = slack(i, x);
    {
      int p = -1;
      double worst = -feas_tol;
      for (int i = 0; i < m; ++i) {
        if (is_active[static_cast<std::size_t>(i)] || excluded[static_cast<std::size_t>(i)]) continue;
        if (sv[static_cast<std::size_t>(i)] < worst) {
          worst = sv[static_cast<std::size_t>(i)];
          p = i;
        }
      }
      if (p < 0) {
        for (int i = 0; i < m; ++i) {
          if (excluded[static_cast<std::size_t>(i)] && sv[static_cast<std::size_t>(i)] < -1e3 * feas_tol) {
            throw Error(ErrorKind::kLpFailure, "QP: a dependent row is left violated");
          }
        }
        out.x = x;
        out.multipliers.assign(static_cast<std::size_t>(m), 0.0);
        for (int k = 0; k < iq; ++k) {
          out.multipliers[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])] = u[static_cast<std::size_t>(k)];
        }
        return out;
      }
      for (int k = 0; k < n; ++k) np[static_cast<std::size_t>(k)] = -c[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
      u[static_cast<std::size_t>(iq)] = 0.0;
      active[static_cast<std::size_t>(iq)] = p;

      for (;;) {  // step towards satisfying row p
        if (++out.iterations > max_iter) throw Error(ErrorKind::kLpFailure, "QP: iteration limit reached");
        for (int i = 0; i < n; ++i) {
          double sum = 0.0;
          for (int k = 0; k < n; ++k) sum += s.J(k, i) * np[static_cast<std::size_t>(k)];
          d[static_cast<std::size_t>(i)] = sum;
        }
        for (int i = 0; i < n; ++i) {
          double sum = 0.0;
          for (int k = iq; k < n; ++k) sum += s.J(i, k) * d[static_cast<std::size_t>(k)];
          z[static_cast<std::size_t>(i)] = sum;
        }
        for (int i = iq - 1; i >= 0; --i) {
          double sum = 0.0;
          for (int k = i + 1; k < iq; ++k) sum += s.R(i, k) * rr[static_cast<std::size_t>(k)];
          rr[static_cast<std::size_t>(i)] = (d[static_cast<std::size_t>(i)] - sum) / s.R(i, i);
        }
        double t1 = kInf;
        int l = -1;
        for (int k = 0; k < iq; ++k) {
          if (rr[static_cast<std::size_t>(k)] > 0.0 && u[static_cast<std::size_t>(k)] / rr[static_cast<std::size_t>(k)] < t1) {
            t1 = u[static_cast<std::size_t>(k)] / rr[static_cast<std::size_t>(k)];
            l = active[static_cast<std::size_t>(k)];
          }
        }
        double t2 = kInf;
        const double zz = dot(z, z);
        if (std::abs(zz) > s.eps) {
          t2 = -sv[static_cast<std::size_t>(p)] / dot(z, np);
          if (t2 < 0.0) t2 = kInf;
        }
        const double t = std::min(t1, t2);
        if (t >= kInf) throw Error(ErrorKind::kLpFailure, "QP: constraints are infeasible");
        if (t2 >= kInf) {
          for (int k = 0; k < iq; ++k) u[static_cast<std::size_t>(k)] -= t * rr[static_cast<std::size_t>(k)];
          u[static_cast<std::size_t>(iq)] += t;
          is_active[static_cast<std::size_t>(l)] = false;
          s.delete_constraint(active, u, iq, l);
          continue;
        }
        for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += t * z[static_cast<std::size_t>(k)];
        for (int k = 0; k < iq; ++k) u[static_cast<std::size_t>(k)] -= t * rr[static_cast<std::size_t>(k)];
        u[static_cast<std::size_t>(iq)] += t;
        if (std::abs(t - t2) < s.eps * std::max(1.0, std::abs(t2))) {
          if (!s.add_constraint(d, iq)) {
            // Row p is numerically dependent on the active rows; it now
            // holds with equality, so keep it out of the active set.
            excluded[static_cast<std::size_t>(p)] = true;
            s.delete_constraint(active, u, iq, p);
          } else {
            is_active[static_cast<std::size_t>(p)] = true;
            std::fill(excluded.begin(), excluded.end(), false);
          }
          break;
        }
        is_active[static_cast<std::size_t>(l)] = false;
        s.delete_constraint(active, u, iq, l);
        sv[static_cast<std::size_t>(p)] = slack(p, x);
      }
    }
  }
}

}  // namespace tsg
