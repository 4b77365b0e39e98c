#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsg {

/// A division of cost among locations 1..n (index i-1 holds location i).
struct Allocation {
  std::string method;
  std::string instance_id;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iterations;
  /// Cost units. For Shapley methods these sum to c(N).
  std::vector<double> absolute;
  /// absolute normalised to sum to 1; empty until fractionalize().
  std::vector<double> fractional;
  /// Sampling estimates before the final rescale, or a proxy's margin terms.
  std::vector<double> raw;
  /// c(N) of the instance the allocation was computed for, when known.
  std::optional<double> total_cost;
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(absolute.size()); }
};

/// Fills `fractional` from `absolute`. Throws kZeroTotal when the absolute
/// values do not have a positive sum.
Allocation fractionalize(Allocation a);

std::string allocation_to_json_text(const Allocation& a);
Allocation allocation_from_json_text(const std::string& text);
void write_allocation(const Allocation& a, const std::filesystem::path& path);
/// Reads and checks the file: lengths agree, fractional sums to 1, and
/// Shapley-method absolute values sum to total_cost.
Allocation read_allocation(const std::filesystem::path& path);

}  // namespace tsg
