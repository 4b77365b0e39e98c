#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsg/allocation.hpp"
#include "tsg/tsp.hpp"

namespace tsg {

// Every proxy returns an Allocation whose `fractional` sums to 1. `raw`
// holds the per-location terms before normalisation. When the grand
// coalition cost is supplied (or computed anyway) `absolute` is
// fractional * c(N); otherwise it equals `raw`. A zero denominator falls
// back to the uniform vector and records a warning.

/// Proportional to the distance from the depot, d_i0.
Allocation depot_proxy(const Instance& inst, std::optional<double> grand_cost = std::nullopt);

/// Proportional to the saving from skipping i on the given tour:
/// d(prev, i) + d(i, next) - d(prev, next).
Allocation shortcut_proxy(const Instance& inst, const Tour& tour, std::optional<double> grand_cost = std::nullopt);

/// Proportional to c(N) - c(N \ i).
Allocation reroute_proxy(CharacteristicFunction& c);

/// ApproShapley over Christofides tour lengths.
Allocation christofides_proxy(const Instance& inst, CharCache& cache, std::int64_t m, std::uint64_t seed);

/// Nested moat packing allocation.
Allocation moat_proxy(const Instance& inst);

/// lambda * moat + (1 - lambda) * depot on fractional vectors.
Allocation blend(const Allocation& moat, const Allocation& depot, double lambda);
Allocation blend_proxy(const Instance& inst, double lambda = 0.6);

inline constexpr double kDefaultLambda = 0.6;
inline constexpr std::int64_t kDefaultIterations = 4000;

struct ProxyOptions {
  double lambda = kDefaultLambda;
  std::int64_t iterations = kDefaultIterations;
  std::uint64_t seed = 0;
};

/// The six proxy names, in presentation order.
const std::vector<std::string>& proxy_names();

/// Runs a proxy by name. Throws kInvalidArgument for an unknown name.
Allocation run_proxy(const std::string& name, const Instance& inst, const ProxyOptions& opts, CharCache& cache);

}  // namespace tsg
