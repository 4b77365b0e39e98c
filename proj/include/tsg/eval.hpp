#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsg/allocation.hpp"

namespace tsg {

/// Kendall rank correlation with pair counts. Values closer than
/// kTieTolerance count as tied.
struct RankCorrelation {
  double tau = 0.0;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t ties_x = 0;
  std::int64_t ties_y = 0;
  double p = 1.0;
};

inline constexpr double kTieTolerance = 1e-12;
/// Below this length kendall_tau reports the exact permutation p value.
inline constexpr int kExactPValueLimit = 8;

/// sqrt(mean squared difference). Throws on empty or unequal lengths.
double rmse(const std::vector<double>& baseline, const std::vector<double>& proxy);
/// sqrt(sum of squared differences), i.e. rmse * sqrt(n).
double l2_error(const std::vector<double>& baseline, const std::vector<double>& proxy);

/// tau-b over all pairs; p from tau_p_value_exact below kExactPValueLimit,
/// otherwise tau_p_value.
RankCorrelation kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

/// Two-tailed normal approximation, z = 3 tau sqrt(n(n-1)) / sqrt(2(2n+5)).
double tau_p_value(const RankCorrelation& rc, int n);
/// Two-tailed p under the uniform null over all n! orderings (tie-free
/// null). Throws for n >= kExactPValueLimit.
double tau_p_value_exact(const RankCorrelation& rc, int n);

/// Argmax indices agree; ties go to the lowest index.
bool top1_match(const std::vector<double>& baseline, const std::vector<double>& proxy);

struct EvalReport {
  std::string instance_id;
  std::string proxy;
  int n = 0;
  double rmse = 0.0;
  double l2 = 0.0;
  /// Population standard deviation of the per-location errors.
  double stdev = 0.0;
  double mean_abs_percent = 0.0;
  double max_abs_percent = 0.0;
  /// Locations left out of the percent figures because the baseline is 0.
  int percent_dropped = 0;
  RankCorrelation rank;
  bool top1 = false;
  /// proxy - baseline per location, fractional.
  std::vector<double> errors;
};

/// Compares fractional vectors. Throws kInvalidArgument when the instance
/// ids differ and kDimensionMismatch when the lengths do.
EvalReport evaluate(const Allocation& baseline, const Allocation& proxy);

struct CorpusSummary {
  int count = 0;
  double rmse_mean = 0.0;
  double rmse_stdev = 0.0;
  double l2_mean = 0.0;
  double l2_stdev = 0.0;
  double tau_mean = 0.0;
  double tau_stdev = 0.0;
  double p_median = 0.0;
  double p_max = 0.0;
  double top1_fraction = 0.0;
  /// Reports with p < 0.05.
  int significant = 0;
};

/// Means and population standard deviations over the reports.
CorpusSummary aggregate_corpus(const std::vector<EvalReport>& reports);

struct BlendInputs {
  Allocation baseline;
  Allocation moat;
  Allocation depot;
};

struct SweepRow {
  double lambda = 0.0;
  /// Corpus mean of the largest per-location absolute error.
  double mean_max_error = 0.0;
  /// Corpus mean of the mean per-location absolute error.
  double mean_error = 0.0;
  /// Corpus mean RMSE.
  double rmse = 0.0;
};

std::vector<SweepRow> sweep_blend(const std::vector<BlendInputs>& corpus, const std::vector<double>& grid);

std::string report_csv_header();
std::string report_csv_row(const EvalReport& r);
std::string report_to_json_text(const EvalReport& r);
std::string summary_to_json_text(const CorpusSummary& s);

}  // namespace tsg
