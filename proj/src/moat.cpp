#include "tsg/moat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "tsg/error.hpp"
#include "tsg/mincut.hpp"
#include "tsg/qp.hpp"
#include "tsg/simplex.hpp"

namespace tsg {

namespace {

constexpr int kMaxRounds = 2000;
constexpr std::int64_t kMaxNestSteps = 1000000;

int edge_row(int i, int j, int v) { return pair_index(i, j, v); }

std::vector<int> cut_rows(std::uint64_t side, int v) {
  std::vector<int> rows;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      if (((side >> i) & 1U) != ((side >> j) & 1U)) rows.push_back(edge_row(i, j, v));
    }
  }
  return rows;
}

double total_width(const MoatPacking& p) {
  double s = 0.0;
  for (const Moat& m : p.moats) s += m.width;
  return s;
}

bool crosses(Coalition a, Coalition b) {
  const std::uint64_t x = a.mask(), y = b.mask();
  return (x & y) != 0 && (x & ~y) != 0 && (y & ~x) != 0;
}

struct Columns {
  int vertex_count;
  std::vector<std::uint64_t> sets;
  std::map<std::uint64_t, std::size_t> index;

  bool add(std::uint64_t side) {
    if (index.count(side)) return false;
    index.emplace(side, sets.size());
    sets.push_back(side);
    return true;
  }
};

// Cut sides whose weight under `y` is below `threshold`.
std::vector<std::uint64_t> light_cuts(int v, const std::vector<double>& y, double threshold) {
  const std::size_t vs = static_cast<std::size_t>(v);
  std::vector<double> w(vs * vs, 0.0);
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      const double x = std::max(0.0, y[static_cast<std::size_t>(edge_row(i, j, v))]);
      w[static_cast<std::size_t>(i) * vs + j] = x;
      w[static_cast<std::size_t>(j) * vs + i] = x;
    }
  }
  std::vector<std::uint64_t> out;
  for (const Cut& c : stoer_wagner_phase_cuts(v, w)) {
    if (c.value < threshold) out.push_back(c.side);
  }
  return out;
}

constexpr int kEnumerateLimit = 22;

// Every cut side (depot outside) of weight below `threshold` under y that is
// not already a column, lightest first, at most `limit` of them. Walks all
// 2^n sides in Gray-code order, updating the weight in O(n) per step.
std::vector<std::uint64_t> light_new_cuts(int v, const std::vector<double>& y, double threshold,
                                          const Columns& cols, std::size_t limit) {
  const std::size_t vs = static_cast<std::size_t>(v);
  std::vector<double> w(vs * vs, 0.0), row_sum(vs, 0.0), inside(vs, 0.0);
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      const double x = std::max(0.0, y[static_cast<std::size_t>(edge_row(i, j, v))]);
      w[static_cast<std::size_t>(i) * vs + j] = x;
      w[static_cast<std::size_t>(j) * vs + i] = x;
      row_sum[static_cast<std::size_t>(i)] += x;
      row_sum[static_cast<std::size_t>(j)] += x;
    }
  }
  std::vector<std::pair<double, std::uint64_t>> found;
  std::uint64_t side = 0;
  double value = 0.0;
  const std::uint64_t steps = std::uint64_t{1} << (v - 1);
  for (std::uint64_t g = 1; g < steps; ++g) {
    const int vert = std::countr_zero(g) + 1;
    const std::size_t vv = static_cast<std::size_t>(vert);
    const double out_edges = row_sum[vv] - inside[vv];
    if ((side >> vert) & 1U) {
      value += inside[vv] - out_edges;
      side &= ~(std::uint64_t{1} << vert);
      for (std::size_t j = 0; j < vs; ++j) inside[j] -= w[vv * vs + j];
    } else {
      value += out_edges - inside[vv];
      side |= std::uint64_t{1} << vert;
      for (std::size_t j = 0; j < vs; ++j) inside[j] += w[vv * vs + j];
    }
    if (value < threshold && !cols.index.count(side)) found.emplace_back(value, side);
  }
  std::sort(found.begin(), found.end());
  if (found.size() > limit) found.resize(limit);
  std::vector<std::uint64_t> out;
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

// max sum w - |w|^2/(2 kappa) over the packing polytope, by column generation
// on the multipliers of the pair rows. Returns widths aligned with cols.sets.
std::vector<double> regularised_packing(const Instance& inst, Columns& cols, double kappa) {
  const int v = inst.vertex_count();
  const int rows = v * (v - 1) / 2;
  std::vector<double> d;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) d.push_back(inst.d(i, j));
  }
  for (int round = 0; round < kMaxRounds; ++round) {
    const std::size_t k = cols.sets.size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(rows) + k, std::vector<double>(k, 0.0));
    std::vector<double> b(static_cast<std::size_t>(rows) + k, 0.0);
    for (std::size_t col = 0; col < k; ++col) {
      for (int r : cut_rows(cols.sets[col], v)) c[static_cast<std::size_t>(r)][col] = 1.0;
      c[static_cast<std::size_t>(rows) + col][col] = -1.0;
    }
    for (int r = 0; r < rows; ++r) b[static_cast<std::size_t>(r)] = d[static_cast<std::size_t>(r)];
    // In units of kappa: min 1/2 |w|^2 - kappa sum w.
    const QpResult qp = identity_qp(std::vector<double>(k, -kappa), c, b);
    if (v < 3) return qp.x;
    std::vector<double> u(qp.multipliers.begin(), qp.multipliers.begin() + rows);
    // A positive column C has u(delta(C)) = kappa - w_C, so the lightest cuts
    // are usually existing columns and min cut alone cannot price new ones.
    const double threshold = kappa * (1.0 - 1e-9);
    const auto fresh = inst.n() <= kEnumerateLimit
                           ? light_new_cuts(v, u, threshold, cols, static_cast<std::size_t>(4 * v))
                           : light_cuts(v, u, threshold);
    bool added = false;
    for (std::uint64_t side : fresh) added |= cols.add(side);
    if (!added) return qp.x;
  }
  throw Error(ErrorKind::kLpFailure, "least-norm packing did not converge");
}

}  // namespace

MoatPacking solve_packing(const Instance& inst) {
  const int v = inst.vertex_count();
  if (!inst.symmetric()) throw Error(ErrorKind::kAsymmetric, "moat packing needs symmetric distances");
  std::vector<double> rhs;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      if (!std::isfinite(inst.d(i, j))) throw Error(ErrorKind::kInvalidArgument, "moat packing needs finite distances");
      rhs.push_back(inst.d(i, j));
    }
  }
  PackingSimplex lp(std::move(rhs));
  Columns cols{v, {}, {}};
  std::vector<int> lp_column;
  auto add = [&](std::uint64_t side) {
    if (!cols.add(side)) return false;
    lp_column.push_back(lp.add_column(2.0, cut_rows(side, v)));
    return true;
  };
  for (int i = 1; i < v; ++i) add(std::uint64_t{1} << i);
  add(Coalition::all(inst.n()).mask());

  MoatPacking out;
  for (int round = 1;; ++round) {
    if (round > kMaxRounds) {
      throw Error(ErrorKind::kLpFailure, "cutting-plane loop did not converge after " + std::to_string(kMaxRounds) +
                                             " rounds (" + std::to_string(lp.columns()) + " columns, objective " +
                                             std::to_string(2.0 * lp.objective()) + ")");
    }
    lp.solve();
    out.rounds = round;
    if (v < 3) break;  // one pair: the singleton column is everything
    bool added = false;
    for (std::uint64_t side : light_cuts(v, lp.duals(), 2.0 - 1e-9)) added |= add(side);
    if (!added) break;
  }
  out.pivots = lp.pivots();
  out.tour_fraction = lp.duals();
  const double lp_value = lp.objective() / 2.0;  // sum of widths

  std::vector<double> widths;
  const double scale = std::max(1.0, inst.max_distance());
  bool centred = false;
  for (double kappa = 1e4 * scale; kappa <= 1e10 * scale && !centred; kappa *= 100.0) {
    try {
      Columns trial = cols;
      std::vector<double> w = regularised_packing(inst, trial, kappa);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (total >= lp_value - 1e-10 * scale * static_cast<double>(v)) {
        cols = std::move(trial);
        widths = std::move(w);
        centred = true;
      }
    } catch (const Error& e) {
      out.warnings.push_back(std::string("least-norm packing: ") + e.what());
      break;
    }
  }
  if (!centred) {
    out.warnings.push_back("least-norm packing unavailable; using the simplex vertex");
    widths.assign(cols.sets.size(), 0.0);
    for (std::size_t k = 0; k < lp_column.size(); ++k) widths[k] = lp.value(lp_column[k]);
  }

  const double drop = 1e-9 * inst.max_distance();
  for (std::size_t k = 0; k < cols.sets.size(); ++k) {
    if (drop > 0.0 && widths[k] > drop) out.moats.push_back({Coalition(cols.sets[k]), widths[k]});
  }
  std::sort(out.moats.begin(), out.moats.end(),
            [](const Moat& a, const Moat& b) { return a.set.mask() < b.set.mask(); });
  out.objective = 2.0 * total_width(out);
  return out;
}

double packing_violation(const MoatPacking& p, const Instance& inst) {
  const int v = inst.vertex_count();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      double load = 0.0;
      for (const Moat& m : p.moats) {
        if (m.set.contains(i) != m.set.contains(j)) load += m.width;
      }
      worst = std::max(worst, load - inst.d(i, j));
    }
  }
  return worst;
}

bool is_nested(const MoatPacking& p) {
  for (std::size_t a = 0; a < p.moats.size(); ++a) {
    if (p.moats[a].width <= 0.0) continue;
    for (std::size_t b = a + 1; b < p.moats.size(); ++b) {
      if (p.moats[b].width > 0.0 && crosses(p.moats[a].set, p.moats[b].set)) return false;
    }
  }
  return true;
}

namespace {

std::vector<double> depot_key(std::uint64_t mask, const Instance& inst) {
  std::vector<double> key;
  for (int i : Coalition(mask).members()) key.push_back(inst.d(0, i));
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

MoatPacking nest(MoatPacking p, const Instance* inst) {
  const double objective = 2.0 * total_width(p);
  const double tol = inst ? 1e-6 * inst->max_distance() : 0.0;
  std::map<std::uint64_t, double> family;
  for (const Moat& m : p.moats) {
    if (m.width > 0.0) family[m.set.mask()] += m.width;
  }
  std::int64_t steps = 0;
  for (;;) {
    // Crossing pair chosen by depot distances rather than labels, so that
    // relabelling the instance relabels the result; masks only break ties.
    std::uint64_t a = 0, b = 0;
    bool found = false;
    std::pair<std::vector<double>, std::vector<double>> best;
    for (auto i = family.begin(); i != family.end(); ++i) {
      for (auto j = std::next(i); j != family.end(); ++j) {
        if (!crosses(Coalition(i->first), Coalition(j->first))) continue;
        if (!inst) {
          if (!found) a = i->first, b = j->first, found = true;
          continue;
        }
        auto ka = depot_key(i->first, *inst);
        auto kb = depot_key(j->first, *inst);
        std::uint64_t ma = i->first, mb = j->first;
        if (kb < ka) std::swap(ka, kb), std::swap(ma, mb);
        auto key = std::make_pair(std::move(ka), std::move(kb));
        if (!found || key < best) {
          best = std::move(key);
          a = ma;
          b = mb;
          found = true;
        }
      }
    }
    if (!found) break;
    if (++steps > kMaxNestSteps) throw Error(ErrorKind::kNestingFailure, "nesting exceeded 10^6 uncrossing steps");
    const double tau = std::min(family[a], family[b]);
    family[a] -= tau;
    family[b] -= tau;
    if (family[a] <= 0.0) family.erase(a);
    if (family[b] <= 0.0) family.erase(b);
    family[a & ~b] += tau;
    family[b & ~a] += tau;
    if (inst) {
      MoatPacking probe;
      for (const auto& [mask, width] : family) probe.moats.push_back({Coalition(mask), width});
      const double excess = packing_violation(probe, *inst);
      if (excess > tol) {
        throw Error(ErrorKind::kNestingFailure, "uncrossing step " + std::to_string(steps) +
                                                    " broke a pair constraint by " + std::to_string(excess));
      }
    }
  }
  p.moats.clear();
  for (const auto& [mask, width] : family) p.moats.push_back({Coalition(mask), width});
  p.objective = 2.0 * total_width(p);
  p.nest_steps += steps;
  if (std::abs(p.objective - objective) > 1e-12 * std::max(1.0, objective)) {
    throw Error(ErrorKind::kNestingFailure, "nesting changed the objective");
  }
  return p;
}

Allocation moat_allocation(const MoatPacking& p, const Instance& inst) {
  Allocation a;
  a.method = "moat";
  a.instance_id = inst.id();
  a.absolute.assign(static_cast<std::size_t>(inst.n()), 0.0);
  for (const Moat& m : p.moats) {
    const auto inside = m.set.members();
    if (inside.empty()) {
      a.warnings.push_back("moat with no locations inside contributes nothing");
      continue;
    }
    const double share = 3.0 * m.width / static_cast<double>(inside.size());
    for (int i : inside) {
      if (i > inst.n()) throw Error(ErrorKind::kDimensionMismatch, "moat names a location outside the instance");
      a.absolute[static_cast<std::size_t>(i - 1)] += share;
    }
  }
  a.raw = a.absolute;
  const double total = std::accumulate(a.absolute.begin(), a.absolute.end(), 0.0);
  if (total > 0.0) a = fractionalize(std::move(a));
  return a;
}

std::string packing_to_json_text(const MoatPacking& p) {
  nlohmann::json doc;
  doc["objective"] = p.objective;
  nlohmann::json moats = nlohmann::json::array();
  for (const Moat& m : p.moats) moats.push_back({{"set", m.set.members()}, {"width", m.width}});
  doc["moats"] = moats;
  doc["rounds"] = p.rounds;
  doc["pivots"] = p.pivots;
  doc["nest_steps"] = p.nest_steps;
  return doc.dump(1) + "\n";
}

}  // namespace tsg
