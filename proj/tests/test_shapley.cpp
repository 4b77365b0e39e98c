#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tsg/error.hpp"
#include "tsg/shapley.hpp"

using namespace tsg;

namespace {

Allocation exact_of(const Instance& inst, int max_n = kExactShapleyLimit) {
  CharCache cache;
  CharacteristicFunction c(inst, SolverKind::kExact, cache);
  return exact_shapley(c, max_n);
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  const double scale = std::max(1e-300, std::abs(sum(b)));
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  return worst;
}

}  // namespace

TEST_CASE("square example matches the published fractions") {
  const Allocation a = exact_of(fixtures::square());
  REQUIRE(a.fractional.size() == 3);
  CHECK(std::abs(a.fractional[0] - 0.299) < 1e-3);
  CHECK(std::abs(a.fractional[1] - 0.402) < 1e-3);
  CHECK(std::abs(a.fractional[2] - 0.299) < 1e-3);
  CHECK(sum(a.absolute) == doctest::Approx(4000.0));
  CHECK(a.method == "exact");
}

TEST_CASE("line pair gives a quarter and three quarters") {
  const Allocation a = exact_of(fixtures::line_pair(3.0));
  CHECK(a.fractional[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(a.fractional[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("exact shapley equals the permutation average") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 2 + static_cast<int>(seed % 6);
    const Instance inst = generate_euclidean(n, seed + 900);
    CharCache cache;
    CharacteristicFunction c(inst, SolverKind::kExact, cache);
    const auto want = oracle::permutation_shapley(n, [&](Coalition s) { return c(s); });
    const Allocation got = exact_shapley(c);
    CHECK(max_rel_error(got.absolute, want) <= 1e-12);
    CHECK(sum(got.absolute) == doctest::Approx(c(Coalition::all(n))).epsilon(1e-12));
    CHECK(sum(got.fractional) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact shapley under the christofides solver matches its own permutation average") {
  const Instance inst = generate_euclidean(7, 31);
  CharCache cache;
  CharacteristicFunction c(inst, SolverKind::kChristofides, cache);
  const auto want = oracle::permutation_shapley(7, [&](Coalition s) { return c(s); });
  CHECK(max_rel_error(exact_shapley(c).absolute, want) <= 1e-12);
}

TEST_CASE("fixed costs shift each value by the location's own cost") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 6;
    const Instance base = generate_euclidean(n, 300 + static_cast<std::uint64_t>(trial));
    std::vector<double> f;
    for (int i = 0; i < n; ++i) f.push_back(rng.uniform01() * 100.0);
    const Allocation plain = exact_of(base);
    const Allocation shifted = exact_of(base.with_fixed_costs(f));
    for (int i = 0; i < n; ++i) {
      const double want = plain.absolute[static_cast<std::size_t>(i)] + f[static_cast<std::size_t>(i)];
      CHECK(std::abs(shifted.absolute[static_cast<std::size_t>(i)] - want) <= 1e-9 * std::abs(want));
    }
  }
}

TEST_CASE("relabelling permutes the exact values") {
  const Instance inst = generate_euclidean(7, 8);
  const std::vector<int> perm{4, 7, 1, 3, 6, 2, 5};
  const Allocation a = exact_of(inst);
  const Allocation b = exact_of(inst.relabeled(perm));
  for (int i = 0; i < 7; ++i) {
    CHECK(b.absolute[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)] - 1)] ==
          doctest::Approx(a.absolute[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("colocated cluster with one opposite location") {
  for (int n : {3, 5, 9, 17}) {
    const Allocation a = exact_of(fixtures::cluster_and_opposite(n, 7.0, 7.0), 17);
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(std::abs(a.fractional[static_cast<std::size_t>(i)] - 1.0 / (2.0 * (n - 1))) < 1e-9);
    }
    CHECK(std::abs(a.fractional.back() - 0.5) < 1e-9);
  }
}

TEST_CASE("cluster with a far opposite location") {
  for (int n : {3, 5, 9, 17}) {
    const Allocation a = exact_of(fixtures::cluster_and_opposite(n, 1.0, n + 1.0), 17);
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(std::abs(a.fractional[static_cast<std::size_t>(i)] - 1.0 / ((n - 1.0) * (n + 2.0))) < 1e-9);
    }
    CHECK(std::abs(a.fractional.back() - (n + 1.0) / (n + 2.0)) < 1e-9);
  }
}

TEST_CASE("appro shapley") {
  SUBCASE("single location gets everything") {
    const Instance one = Instance::from_coords({{0, 0}, {3, 4}});
    CharCache cache;
    CharacteristicFunction c(one, SolverKind::kExact, cache);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
      const Allocation a = appro_shapley(c, 5, seed);
      CHECK(a.absolute == std::vector<double>{10.0});
      CHECK(a.fractional == std::vector<double>{1.0});
    }
  }
  SUBCASE("identical rows share equally") {
    const Instance twins = Instance::from_matrix({{0, 5, 5, 4}, {5, 0, 0, 3}, {5, 0, 0, 3}, {4, 3, 3, 0}});
    CharCache cache;
    CharacteristicFunction c(twins, SolverKind::kExact, cache);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Allocation a = appro_shapley(c, 200, seed);
      CHECK(a.absolute[0] == doctest::Approx(a.absolute[1]).epsilon(0.2));
    }
    // Every margin of a twin is identical whenever the other twin is present.
    const Allocation exact = exact_shapley(c);
    CHECK(exact.absolute[0] == doctest::Approx(exact.absolute[1]));
  }
  SUBCASE("square converges to the exact fractions") {
    const Instance sq = fixtures::square();
    CharCache cache;
    CharacteristicFunction c(sq, SolverKind::kExact, cache);
    const Allocation exact = exact_shapley(c);
    const Allocation a = appro_shapley(c, 4000, 17);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(a.fractional[static_cast<std::size_t>(i)] - exact.fractional[static_cast<std::size_t>(i)]) <
            0.02);
    }
    CHECK(sum(a.absolute) == doctest::Approx(4000.0).epsilon(1e-12));
    CHECK(a.raw.size() == 3);
    CHECK(a.iterations == std::optional<std::int64_t>(4000));
    CHECK(a.seed == std::optional<std::uint64_t>(17));
  }
  SUBCASE("deterministic per seed") {
    const Instance inst = generate_euclidean(9, 4);
    CharCache cache;
    CharacteristicFunction c(inst, SolverKind::kExact, cache);
    CHECK(appro_shapley(c, 50, 3).absolute == appro_shapley(c, 50, 3).absolute);
    CHECK(appro_shapley(c, 50, 3).absolute != appro_shapley(c, 50, 4).absolute);
  }
  SUBCASE("rejects a zero iteration count") {
    const Instance sq = fixtures::square();
    CharCache cache;
    CharacteristicFunction c(sq, SolverKind::kExact, cache);
    CHECK_THROWS_AS(appro_shapley(c, 0, 1), Error);
    CHECK_THROWS_AS(subset_shapley(c, 0, 1), Error);
  }
}

TEST_CASE("raw sampling estimates are unbiased") {
  // Mean of many independent short runs approaches the exact value.
  const Instance inst = generate_euclidean(6, 12);
  CharCache cache;
  CharacteristicFunction c(inst, SolverKind::kExact, cache);
  const Allocation exact = exact_shapley(c);
  std::vector<double> appro_mean(6, 0.0), subset_mean(6, 0.0);
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    const Allocation a = appro_shapley(c, 5, derive_seed(1, static_cast<std::uint64_t>(r)));
    const Allocation s = subset_shapley(c, 5, derive_seed(2, static_cast<std::uint64_t>(r)));
    for (int i = 0; i < 6; ++i) {
      appro_mean[static_cast<std::size_t>(i)] += a.raw[static_cast<std::size_t>(i)] / runs;
      subset_mean[static_cast<std::size_t>(i)] += s.raw[static_cast<std::size_t>(i)] / runs;
    }
  }
  const double total = sum(exact.absolute);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(appro_mean[static_cast<std::size_t>(i)] - exact.absolute[static_cast<std::size_t>(i)]) <
          0.02 * total);
    CHECK(std::abs(subset_mean[static_cast<std::size_t>(i)] - exact.absolute[static_cast<std::size_t>(i)]) <
          0.05 * total);
  }
}

TEST_CASE("subset shapley") {
  const Instance one = Instance::from_coords({{0, 0}, {0, 2}});
  CharCache cache;
  CharacteristicFunction c1(one, SolverKind::kExact, cache);
  CHECK(subset_shapley(c1, 3, 1).absolute == std::vector<double>{4.0});

  const Instance inst = generate_euclidean(8, 77);
  CharCache cache2;
  CharacteristicFunction c(inst, SolverKind::kExact, cache2);
  const Allocation a = subset_shapley(c, 100, 9);
  CHECK(a.absolute == subset_shapley(c, 100, 9).absolute);
  CHECK(sum(a.absolute) == doctest::Approx(c(Coalition::all(8))).epsilon(1e-12));
  CHECK(a.method == "subset");
}

TEST_CASE("sampling error shrinks with more iterations") {
  double err_small = 0.0, err_large = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate_euclidean(8, 4000 + seed);
    CharCache cache;
    CharacteristicFunction c(inst, SolverKind::kExact, cache);
    const Allocation exact = exact_shapley(c);
    const Allocation small = appro_shapley(c, 10, seed);
    const Allocation large = appro_shapley(c, 1000, seed);
    for (int i = 0; i < 8; ++i) {
      err_small += std::abs(small.fractional[static_cast<std::size_t>(i)] - exact.fractional[static_cast<std::size_t>(i)]);
      err_large += std::abs(large.fractional[static_cast<std::size_t>(i)] - exact.fractional[static_cast<std::size_t>(i)]);
    }
  }
  CHECK(err_large < err_small);
}

TEST_CASE("exact shapley enforces its size limit") {
  const Instance inst = generate_euclidean(16, 1);
  CharCache cache;
  CharacteristicFunction c(inst, SolverKind::kExact, cache);
  CHECK_THROWS_AS(exact_shapley(c), Error);
}

TEST_CASE("fractionalize") {
  Allocation a;
  a.absolute = {2, 2};
  CHECK(fractionalize(a).fractional == std::vector<double>{0.5, 0.5});
  a.absolute = {1, 3};
  const Allocation f = fractionalize(a);
  CHECK(f.fractional == std::vector<double>{0.25, 0.75});
  CHECK(fractionalize(f).fractional == f.fractional);
  CHECK(f.absolute == a.absolute);
  a.absolute = {0, 0};
  CHECK_THROWS_AS(fractionalize(a), Error);
}

TEST_CASE("allocation json round trip") {
  const Instance inst = generate_euclidean(6, 2);
  CharCache cache;
  CharacteristicFunction c(inst, SolverKind::kExact, cache);
  const Allocation a = appro_shapley(c, 30, 4);
  const Allocation b = allocation_from_json_text(allocation_to_json_text(a));
  CHECK(b.method == a.method);
  CHECK(b.instance_id == a.instance_id);
  CHECK(b.absolute == a.absolute);
  CHECK(b.fractional == a.fractional);
  CHECK(b.raw == a.raw);
  CHECK(b.seed == a.seed);
  CHECK(b.iterations == a.iterations);
  CHECK(b.total_cost == a.total_cost);
}
