#include "tsg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "tsg/error.hpp"

namespace tsg {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t min) {
  if (a != b) {
    throw Error(ErrorKind::kDimensionMismatch,
                "vectors have lengths " + std::to_string(a) + " and " + std::to_string(b));
  }
  if (a < min) throw Error(ErrorKind::kInvalidArgument, "need at least " + std::to_string(min) + " values");
}

int sign_of(double diff) {
  if (std::abs(diff) <= kTieTolerance) return 0;
  return diff > 0.0 ? 1 : -1;
}

RankCorrelation count_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  RankCorrelation rc;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign_of(x[i] - x[j]);
      const int sy = sign_of(y[i] - y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) {
        ++rc.ties_x;
      } else if (sy == 0) {
        ++rc.ties_y;
      } else if (sx == sy) {
        ++rc.concordant;
      } else {
        ++rc.discordant;
      }
    }
  }
  const double mn = static_cast<double>(rc.concordant + rc.discordant);
  const double denom = std::sqrt((mn + static_cast<double>(rc.ties_x)) * (mn + static_cast<double>(rc.ties_y)));
  rc.tau = denom > 0.0 ? static_cast<double>(rc.concordant - rc.discordant) / denom : 0.0;
  return rc;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double population_stdev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best] + kTieTolerance) best = i;
  }
  return best;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double rmse(const std::vector<double>& baseline, const std::vector<double>& proxy) {
  return l2_error(baseline, proxy) / std::sqrt(static_cast<double>(baseline.size()));
}

double l2_error(const std::vector<double>& baseline, const std::vector<double>& proxy) {
  check_lengths(baseline.size(), proxy.size(), 1);
  double s = 0.0;
  for (std::size_t i = 0; i < baseline.size(); ++i) s += (baseline[i] - proxy[i]) * (baseline[i] - proxy[i]);
  return std::sqrt(s);
}

RankCorrelation kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  check_lengths(x.size(), y.size(), 2);
  RankCorrelation rc = count_pairs(x, y);
  const int n = static_cast<int>(x.size());
  rc.p = n < kExactPValueLimit ? tau_p_value_exact(rc, n) : tau_p_value(rc, n);
  return rc;
}

double tau_p_value(const RankCorrelation& rc, int n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "p value needs at least 2 values");
  const double nn = static_cast<double>(n);
  const double z = 3.0 * rc.tau * std::sqrt(nn * (nn - 1.0)) / std::sqrt(2.0 * (2.0 * nn + 5.0));
  return std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

double tau_p_value_exact(const RankCorrelation& rc, int n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "p value needs at least 2 values");
  if (n >= kExactPValueLimit) throw Error(ErrorKind::kInvalidArgument, "exact p value enumerates n! orderings; n must be below 8");
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  std::iota(x.begin(), x.end(), 0.0);
  std::iota(y.begin(), y.end(), 0.0);
  std::int64_t hits = 0, total = 0;
  do {
    ++total;
    if (std::abs(count_pairs(x, y).tau) >= std::abs(rc.tau) - 1e-12) ++hits;
  } while (std::next_permutation(y.begin(), y.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

bool top1_match(const std::vector<double>& baseline, const std::vector<double>& proxy) {
  check_lengths(baseline.size(), proxy.size(), 1);
  return argmax(baseline) == argmax(proxy);
}

EvalReport evaluate(const Allocation& baseline, const Allocation& proxy) {
  if (baseline.instance_id != proxy.instance_id) {
    throw Error(ErrorKind::kInvalidArgument, "allocations belong to different instances: '" +
                                                 baseline.instance_id + "' and '" + proxy.instance_id + "'");
  }
  const auto& b = baseline.fractional;
  const auto& p = proxy.fractional;
  check_lengths(b.size(), p.size(), 1);
  EvalReport r;
  r.instance_id = baseline.instance_id;
  r.proxy = proxy.method;
  r.n = static_cast<int>(b.size());
  r.rmse = rmse(b, p);
  r.l2 = l2_error(b, p);
  for (std::size_t i = 0; i < b.size(); ++i) r.errors.push_back(p[i] - b[i]);
  r.stdev = population_stdev(r.errors);
  std::vector<double> percent;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0.0) {
      ++r.percent_dropped;
      continue;
    }
    percent.push_back(std::abs(b[i] - p[i]) / b[i] * 100.0);
  }
  if (!percent.empty()) {
    r.mean_abs_percent = mean(percent);
    r.max_abs_percent = *std::max_element(percent.begin(), percent.end());
  }
  if (b.size() >= 2) r.rank = kendall_tau(b, p);
  r.top1 = top1_match(b, p);
  return r;
}

CorpusSummary aggregate_corpus(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorKind::kInvalidArgument, "no reports to aggregate");
  std::vector<double> rm, l2, tau, p;
  CorpusSummary s;
  s.count = static_cast<int>(reports.size());
  int top = 0;
  for (const EvalReport& r : reports) {
    rm.push_back(r.rmse);
    l2.push_back(r.l2);
    tau.push_back(r.rank.tau);
    p.push_back(r.rank.p);
    top += r.top1 ? 1 : 0;
    s.significant += r.rank.p < 0.05 ? 1 : 0;
  }
  s.rmse_mean = mean(rm);
  s.rmse_stdev = population_stdev(rm);
  s.l2_mean = mean(l2);
  s.l2_stdev = population_stdev(l2);
  s.tau_mean = mean(tau);
  s.tau_stdev = population_stdev(tau);
  std::sort(p.begin(), p.end());
  const std::size_t mid = p.size() / 2;
  s.p_median = p.size() % 2 ? p[mid] : 0.5 * (p[mid - 1] + p[mid]);
  s.p_max = p.back();
  s.top1_fraction = static_cast<double>(top) / static_cast<double>(reports.size());
  return s;
}

std::vector<SweepRow> sweep_blend(const std::vector<BlendInputs>& corpus, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "lambda grid is empty");
  if (corpus.empty()) throw Error(ErrorKind::kInvalidArgument, "corpus is empty");
  std::vector<SweepRow> rows;
  for (double lambda : grid) {
    SweepRow row;
    row.lambda = lambda;
    for (const BlendInputs& in : corpus) {
      const auto& b = in.baseline.fractional;
      const auto& m = in.moat.fractional;
      const auto& d = in.depot.fractional;
      check_lengths(b.size(), m.size(), 1);
      check_lengths(b.size(), d.size(), 1);
      std::vector<double> mix(b.size());
      double worst = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) {
        mix[i] = lambda * m[i] + (1.0 - lambda) * d[i];
        const double e = std::abs(mix[i] - b[i]);
        worst = std::max(worst, e);
        sum += e;
      }
      row.mean_max_error += worst;
      row.mean_error += sum / static_cast<double>(b.size());
      row.rmse += rmse(b, mix);
    }
    const double count = static_cast<double>(corpus.size());
    row.mean_max_error /= count;
    row.mean_error /= count;
    row.rmse /= count;
    rows.push_back(row);
  }
  return rows;
}

std::string report_csv_header() { return "instance_id,n,proxy,rmse,tau,p,top1"; }

std::string report_csv_row(const EvalReport& r) {
  return r.instance_id + "," + std::to_string(r.n) + "," + r.proxy + "," + number(r.rmse) + "," + number(r.rank.tau) +
         "," + number(r.rank.p) + "," + (r.top1 ? "1" : "0");
}

std::string report_to_json_text(const EvalReport& r) {
  nlohmann::json doc;
  doc["instance_id"] = r.instance_id;
  doc["proxy"] = r.proxy;
  doc["n"] = r.n;
  doc["rmse"] = r.rmse;
  doc["l2_error"] = r.l2;
  doc["stdev"] = r.stdev;
  doc["mean_abs_percent"] = r.mean_abs_percent;
  doc["max_abs_percent"] = r.max_abs_percent;
  doc["percent_dropped"] = r.percent_dropped;
  doc["rank"] = {{"tau", r.rank.tau},
                 {"concordant", r.rank.concordant},
                 {"discordant", r.rank.discordant},
                 {"ties_x", r.rank.ties_x},
                 {"ties_y", r.rank.ties_y},
                 {"p", r.rank.p},
                 {"p_method", r.n < kExactPValueLimit ? "exact permutation null"
                                                      : "normal approximation z = 3 tau sqrt(n(n-1))/sqrt(2(2n+5))"}};
  doc["top1"] = r.top1;
  doc["errors"] = r.errors;
  return doc.dump(1) + "\n";
}

std::string summary_to_json_text(const CorpusSummary& s) {
  nlohmann::json doc;
  doc["count"] = s.count;
  doc["rmse_mean"] = s.rmse_mean;
  doc["rmse_stdev"] = s.rmse_stdev;
  doc["l2_mean"] = s.l2_mean;
  doc["l2_stdev"] = s.l2_stdev;
  doc["tau_mean"] = s.tau_mean;
  doc["tau_stdev"] = s.tau_stdev;
  doc["p_median"] = s.p_median;
  doc["p_max"] = s.p_max;
  doc["top1_fraction"] = s.top1_fraction;
  doc["significant"] = s.significant;
  return doc.dump(1) + "\n";
}

}  // namespace tsg
