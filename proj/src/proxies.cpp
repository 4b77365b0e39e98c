#include "tsg/proxies.hpp"

#include <cmath>
#include <numeric>

#include "tsg/error.hpp"
#include "tsg/moat.hpp"
#include "tsg/shapley.hpp"

namespace tsg {

namespace {

Allocation from_terms(const char* method, const Instance& inst, std::vector<double> terms,
                      std::optional<double> grand_cost) {
  Allocation a;
  a.method = method;
  a.instance_id = inst.id();
  a.total_cost = grand_cost;
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
  const std::size_t n = terms.size();
  a.fractional.assign(n, 1.0 / static_cast<double>(n));
  if (total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) a.fractional[i] = terms[i] / total;
  } else {
    a.warnings.push_back(std::string(method) + ": terms sum to zero, using the uniform allocation");
  }
  a.raw = std::move(terms);
  if (grand_cost) {
    a.absolute.resize(n);
    for (std::size_t i = 0; i < n; ++i) a.absolute[i] = a.fractional[i] * *grand_cost;
  } else {
    a.absolute = a.raw;
  }
  return a;
}

}  // namespace

Allocation depot_proxy(const Instance& inst, std::optional<double> grand_cost) {
  std::vector<double> terms;
  for (int i = 1; i <= inst.n(); ++i) terms.push_back(inst.d(i, 0));
  return from_terms("depot", inst, std::move(terms), grand_cost);
}

Allocation shortcut_proxy(const Instance& inst, const Tour& tour, std::optional<double> grand_cost) {
  const int n = inst.n();
  if (tour.order.size() != static_cast<std::size_t>(n) + 2) {
    throw Error(ErrorKind::kDimensionMismatch, "shortcut proxy needs a tour through every location");
  }
  std::vector<double> terms(static_cast<std::size_t>(n), 0.0);
  for (std::size_t p = 1; p + 1 < tour.order.size(); ++p) {
    const int prev = tour.order[p - 1], i = tour.order[p], next = tour.order[p + 1];
    terms[static_cast<std::size_t>(i - 1)] = inst.d(prev, i) + inst.d(i, next) - inst.d(prev, next);
  }
  return from_terms("shortcut", inst, std::move(terms), grand_cost ? grand_cost : std::optional(tour.length));
}

Allocation reroute_proxy(CharacteristicFunction& c) {
  const Instance& inst = c.instance();
  const Coalition all = Coalition::all(inst.n());
  const double grand = c(all);
  std::vector<double> terms;
  for (int i = 1; i <= inst.n(); ++i) terms.push_back(grand - c(all.without(i)));
  return from_terms("reroute", inst, std::move(terms), grand);
}

Allocation christofides_proxy(const Instance& inst, CharCache& cache, std::int64_t m, std::uint64_t seed) {
  CharacteristicFunction c(inst, SolverKind::kChristofides, cache);
  Allocation a = appro_shapley(c, m, seed);
  a.method = "christofides";
  if (a.fractional.empty()) {
    a.fractional.assign(a.absolute.size(), 1.0 / static_cast<double>(a.absolute.size()));
    a.warnings.push_back("christofides: zero total, using the uniform allocation");
  }
  return a;
}

Allocation moat_proxy(const Instance& inst) {
  const Allocation packed = moat_allocation(nest(solve_packing(inst), &inst), inst);
  Allocation a = from_terms("moat", inst, packed.absolute, std::nullopt);
  a.warnings.insert(a.warnings.begin(), packed.warnings.begin(), packed.warnings.end());
  return a;
}

Allocation blend(const Allocation& moat, const Allocation& depot, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must lie in [0, 1]");
  if (moat.fractional.size() != depot.fractional.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "blend inputs have different lengths");
  }
  Allocation a;
  a.method = "blend";
  a.instance_id = moat.instance_id;
  a.fractional.resize(moat.fractional.size());
  for (std::size_t i = 0; i < a.fractional.size(); ++i) {
    a.fractional[i] = lambda * moat.fractional[i] + (1.0 - lambda) * depot.fractional[i];
  }
  a.absolute = a.fractional;
  a.warnings = moat.warnings;
  a.warnings.insert(a.warnings.end(), depot.warnings.begin(), depot.warnings.end());
  return a;
}

Allocation blend_proxy(const Instance& inst, double lambda) {
  return blend(moat_proxy(inst), depot_proxy(inst), lambda);
}

const std::vector<std::string>& proxy_names() {
  static const std::vector<std::string> names{"depot", "shortcut", "reroute", "christofides", "moat", "blend"};
  return names;
}

Allocation run_proxy(const std::string& name, const Instance& inst, const ProxyOptions& opts, CharCache& cache) {
  if (name == "depot") return depot_proxy(inst);
  if (name == "shortcut") return shortcut_proxy(inst, solve_optimal(inst, Coalition::all(inst.n())));
  if (name == "reroute") {
    CharacteristicFunction c(inst, SolverKind::kExact, cache);
    return reroute_proxy(c);
  }
  if (name == "christofides") return christofides_proxy(inst, cache, opts.iterations, opts.seed);
  if (name == "moat") return moat_proxy(inst);
  if (name == "blend") return blend_proxy(inst, opts.lambda);
  throw Error(ErrorKind::kInvalidArgument, "unknown proxy \"" + name + "\"");
}

}  // namespace tsg
