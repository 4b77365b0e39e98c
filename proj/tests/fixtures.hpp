// Hand-built games used across the suites.
#pragma once

#include <vector>

#include "tsg/instance.hpp"

namespace fixtures {

/// Depot at one corner of a square of side `a`; locations 1 and 3 are the
/// adjacent corners and 2 the opposite one.
inline tsg::Instance square(double a = 1000.0) {
  return tsg::Instance::from_coords({{0, 0}, {0, a}, {a, a}, {a, 0}});
}

/// Locations 1..n-1 colocated at distance a on one side of the depot and
/// location n at distance `far` on the other side (all on a line).
inline tsg::Instance cluster_and_opposite(int n, double a, double far) {
  std::vector<tsg::Point> pts{{0, 0}};
  for (int i = 1; i < n; ++i) pts.push_back({-a, 0});
  pts.push_back({far, 0});
  return tsg::Instance::from_coords(std::move(pts));
}

/// Depot, then location 1 at distance a and location 2 a further a down
/// the same road.
inline tsg::Instance line_pair(double a = 1.0) {
  return tsg::Instance::from_coords({{0, 0}, {a, 0}, {2 * a, 0}});
}

/// Locations 1, 2 within eps of each other and the depot; 3, 4 at distance
/// k*a from that cluster and eps from each other.
inline tsg::Instance two_clusters(double eps, double ka) {
  const double f = ka;
  return tsg::Instance::from_matrix({
      {0, eps, eps, f, f},
      {eps, 0, eps, f, f},
      {eps, eps, 0, f, f},
      {f, f, f, 0, eps},
      {f, f, f, eps, 0},
  });
}

}  // namespace fixtures
