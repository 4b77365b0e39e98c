#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsg {

/// Largest supported location count; coalitions are 64-bit masks over 1..n.
inline constexpr int kMaxLocations = 62;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// A subset of locations. Bit i stands for location i (1-based); bit 0 is
/// never set because the depot belongs to every tour implicitly.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t mask) : mask_(mask & ~std::uint64_t{1}) {}

  /// {1, ..., n}
  static constexpr Coalition all(int n) {
    return Coalition(n >= 63 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (n + 1)) - 2));
  }
  static constexpr Coalition single(int i) { return Coalition(std::uint64_t{1} << i); }
  static Coalition of(std::initializer_list<int> members);

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(int i) const { return (mask_ >> i) & 1U; }

  constexpr Coalition with(int i) const { return Coalition(mask_ | (std::uint64_t{1} << i)); }
  constexpr Coalition without(int i) const { return Coalition(mask_ & ~(std::uint64_t{1} << i)); }

  /// Members in ascending order.
  std::vector<int> members() const;

  constexpr bool operator==(const Coalition&) const = default;

 private:
  std::uint64_t mask_ = 0;
};

/// A traveling-salesperson game: depot 0 plus locations 1..n.
///
/// Instances are immutable once built; use the factory functions.
class Instance {
 public:
  /// Builds from an (n+1)x(n+1) row-major matrix. Throws on shape errors,
  /// negative or NaN entries, or a nonzero diagonal.
  static Instance from_matrix(std::vector<std::vector<double>> matrix);

  /// Builds from Euclidean points; points[0] is the depot.
  static Instance from_coords(std::vector<Point> points);

  int n() const { return n_; }
  int vertex_count() const { return n_ + 1; }

  double d(int i, int j) const { return dist_[static_cast<std::size_t>(i) * stride_ + j]; }
  double max_distance() const;

  const std::optional<std::vector<Point>>& coords() const { return coords_; }
  const std::optional<std::vector<double>>& fixed_costs() const { return fixed_costs_; }

  /// Fixed cost f(i) of location i (0 when none are set).
  double fixed_cost(int i) const {
    return fixed_costs_ ? (*fixed_costs_)[static_cast<std::size_t>(i - 1)] : 0.0;
  }
  /// Sum of f(i) over the coalition.
  double fixed_cost(Coalition s) const;

  /// True when two distinct vertices are at distance zero.
  bool degenerate() const { return degenerate_; }
  bool symmetric() const;

  const std::string& id() const { return id_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  Instance with_fixed_costs(std::vector<double> costs) const;
  Instance with_metadata(std::string id, std::optional<std::uint64_t> seed) const;
  /// Every distance multiplied by k (> 0); coordinates scaled too.
  Instance scaled(double k) const;
  /// Locations relabelled so that new location perm[i-1] is old location i.
  Instance relabeled(const std::vector<int>& perm) const;

  std::vector<std::vector<double>> matrix() const;

  bool operator==(const Instance& other) const;

 private:
  Instance() = default;
  void finish();

  int n_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> dist_;
  std::optional<std::vector<Point>> coords_;
  std::optional<std::vector<double>> fixed_costs_;
  bool degenerate_ = false;
  std::string id_;
  std::optional<std::uint64_t> seed_;
};

struct ValidationReport {
  bool symmetric = true;
  bool metric = true;
  bool finite = true;
  /// Worst triangle violation d_ik - (d_ij + d_jk); zero when metric.
  struct Violation {
    int i = 0, j = 0, k = 0;
    double magnitude = 0.0;
  };
  std::optional<Violation> worst_violation;
};

/// n+1 uniform points in [0, square]^2, rounded to float then widened.
Instance generate_euclidean(int n, std::uint64_t seed, double square = 1000.0);

/// d_ij = d_ji = max(d_ij, d_ji); coordinates are dropped.
Instance symmetrize(const Instance& inst);

/// Triangle tolerance is 1e-9 times the largest finite distance.
ValidationReport validate(const Instance& inst);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& inst, const std::filesystem::path& path);

/// Parses the JSON instance document (see README for the schema).
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& inst);
/// `id,x,y` rows with the depot first; an optional header row is skipped.
Instance instance_from_csv_text(const std::string& text);

}  // namespace tsg
