#include "tsg/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tsg/error.hpp"
#include "tsg/rng.hpp"

namespace tsg {

using nlohmann::json;

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kCoalitionTooLarge: return "coalition too large";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kAsymmetric: return "asymmetric distances";
    case ErrorKind::kLpFailure: return "LP failure";
    case ErrorKind::kNestingFailure: return "nesting failure";
    case ErrorKind::kZeroTotal: return "zero total";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

Coalition Coalition::of(std::initializer_list<int> members) {
  std::uint64_t mask = 0;
  for (int i : members) mask |= std::uint64_t{1} << i;
  return Coalition(mask);
}

std::vector<int> Coalition::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

Instance Instance::from_matrix(std::vector<std::vector<double>> matrix) {
  const std::size_t v = matrix.size();
  if (v < 2) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix needs the depot and at least one location");
  }
  if (v - 1 > static_cast<std::size_t>(kMaxLocations)) {
    throw Error(ErrorKind::kInvalidArgument, "at most " + std::to_string(kMaxLocations) + " locations");
  }
  Instance inst;
  inst.n_ = static_cast<int>(v) - 1;
  inst.stride_ = v;
  inst.dist_.resize(v * v);
  for (std::size_t i = 0; i < v; ++i) {
    if (matrix[i].size() != v) {
      throw Error(ErrorKind::kDimensionMismatch, "row " + std::to_string(i) + " has " +
                                                     std::to_string(matrix[i].size()) + " entries, expected " +
                                                     std::to_string(v));
    }
    for (std::size_t j = 0; j < v; ++j) {
      const double x = matrix[i][j];
      if (std::isnan(x) || x < 0.0) {
        throw Error(ErrorKind::kInvalidArgument,
                    "negative or NaN distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (i == j && x != 0.0) {
        throw Error(ErrorKind::kInvalidArgument, "nonzero diagonal at " + std::to_string(i));
      }
      inst.dist_[i * v + j] = x;
    }
  }
  inst.finish();
  return inst;
}

Instance Instance::from_coords(std::vector<Point> points) {
  const std::size_t v = points.size();
  if (v < 2) {
    throw Error(ErrorKind::kDimensionMismatch, "need the depot and at least one location");
  }
  if (v - 1 > static_cast<std::size_t>(kMaxLocations)) {
    throw Error(ErrorKind::kInvalidArgument, "at most " + std::to_string(kMaxLocations) + " locations");
  }
  Instance inst;
  inst.n_ = static_cast<int>(v) - 1;
  inst.stride_ = v;
  inst.dist_.assign(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = i + 1; j < v; ++j) {
      const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      inst.dist_[i * v + j] = d;
      inst.dist_[j * v + i] = d;
    }
  }
  inst.coords_ = std::move(points);
  inst.finish();
  return inst;
}

void Instance::finish() {
  degenerate_ = false;
  for (int i = 0; i <= n_ && !degenerate_; ++i) {
    for (int j = 0; j <= n_; ++j) {
      if (i != j && d(i, j) == 0.0) {
        degenerate_ = true;
        break;
      }
    }
  }
}

double Instance::max_distance() const {
  double best = 0.0;
  for (double x : dist_) {
    if (std::isfinite(x)) best = std::max(best, x);
  }
  return best;
}

double Instance::fixed_cost(Coalition s) const {
  if (!fixed_costs_) return 0.0;
  double total = 0.0;
  for (int i : s.members()) total += fixed_cost(i);
  return total;
}

bool Instance::symmetric() const {
  for (int i = 0; i <= n_; ++i) {
    for (int j = i + 1; j <= n_; ++j) {
      if (d(i, j) != d(j, i)) return false;
    }
  }
  return true;
}

Instance Instance::with_fixed_costs(std::vector<double> costs) const {
  if (costs.size() != static_cast<std::size_t>(n_)) {
    throw Error(ErrorKind::kDimensionMismatch, "expected " + std::to_string(n_) + " fixed costs, got " +
                                                   std::to_string(costs.size()));
  }
  for (double f : costs) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw Error(ErrorKind::kInvalidArgument, "fixed costs must be finite and nonnegative");
    }
  }
  Instance out = *this;
  out.fixed_costs_ = std::move(costs);
  return out;
}

Instance Instance::with_metadata(std::string id, std::optional<std::uint64_t> seed) const {
  Instance out = *this;
  out.id_ = std::move(id);
  out.seed_ = seed;
  return out;
}

Instance Instance::scaled(double k) const {
  if (!(k > 0.0)) throw Error(ErrorKind::kInvalidArgument, "scale factor must be positive");
  Instance out = *this;
  for (double& x : out.dist_) x *= k;
  if (out.coords_) {
    for (Point& p : *out.coords_) {
      p.x *= k;
      p.y *= k;
    }
  }
  return out;
}

Instance Instance::relabeled(const std::vector<int>& perm) const {
  if (perm.size() != static_cast<std::size_t>(n_)) {
    throw Error(ErrorKind::kDimensionMismatch, "permutation length must equal n");
  }
  // old vertex -> new vertex, depot fixed.
  std::vector<int> to_new(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 1; i <= n_; ++i) to_new[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i - 1)];
  Instance out = *this;
  for (int i = 0; i <= n_; ++i) {
    for (int j = 0; j <= n_; ++j) {
      out.dist_[static_cast<std::size_t>(to_new[i]) * stride_ + to_new[j]] = d(i, j);
    }
  }
  if (coords_) {
    for (int i = 0; i <= n_; ++i) (*out.coords_)[static_cast<std::size_t>(to_new[i])] = (*coords_)[i];
  }
  if (fixed_costs_) {
    for (int i = 1; i <= n_; ++i) {
      (*out.fixed_costs_)[static_cast<std::size_t>(to_new[i] - 1)] = (*fixed_costs_)[i - 1];
    }
  }
  return out;
}

std::vector<std::vector<double>> Instance::matrix() const {
  std::vector<std::vector<double>> m(stride_, std::vector<double>(stride_));
  for (std::size_t i = 0; i < stride_; ++i) {
    for (std::size_t j = 0; j < stride_; ++j) m[i][j] = dist_[i * stride_ + j];
  }
  return m;
}

bool Instance::operator==(const Instance& other) const {
  return n_ == other.n_ && dist_ == other.dist_ && coords_ == other.coords_ &&
         fixed_costs_ == other.fixed_costs_ && id_ == other.id_ && seed_ == other.seed_;
}

namespace {

// Kept out of line: g++ 11 at -O3 vectorises the loop below and drops the
// narrowing conversion for one of the two lanes.
[[gnu::noinline]] double to_float_precision(double x) {
  volatile float f = static_cast<float>(x);
  return static_cast<double>(f);
}

}  // namespace

Instance generate_euclidean(int n, std::uint64_t seed, double square) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "n must be at least 1");
  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n) + 1);
  for (Point& p : pts) {
    p.x = to_float_precision(rng.uniform01() * square);
    p.y = to_float_precision(rng.uniform01() * square);
  }
  return Instance::from_coords(std::move(pts))
      .with_metadata("euclid-n" + std::to_string(n) + "-s" + std::to_string(seed), seed);
}

Instance symmetrize(const Instance& inst) {
  auto m = inst.matrix();
  const std::size_t v = m.size();
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = i + 1; j < v; ++j) {
      const double x = std::max(m[i][j], m[j][i]);
      m[i][j] = x;
      m[j][i] = x;
    }
  }
  Instance out = Instance::from_matrix(std::move(m)).with_metadata(inst.id(), inst.seed());
  if (inst.fixed_costs()) out = out.with_fixed_costs(*inst.fixed_costs());
  return out;
}

ValidationReport validate(const Instance& inst) {
  ValidationReport r;
  const int v = inst.vertex_count();
  for (int i = 0; i < v; ++i) {
    for (int j = 0; j < v; ++j) {
      if (!std::isfinite(inst.d(i, j))) r.finite = false;
      if (inst.d(i, j) != inst.d(j, i)) r.symmetric = false;
    }
  }
  const double tol = 1e-9 * inst.max_distance();
  for (int i = 0; i < v; ++i) {
    for (int j = 0; j < v; ++j) {
      if (j == i) continue;
      for (int k = 0; k < v; ++k) {
        if (k == i || k == j) continue;
        const double lhs = inst.d(i, j) + inst.d(j, k);
        const double rhs = inst.d(i, k);
        // inf on the left never violates; inf only on the right always does.
        const double excess = std::isinf(lhs) ? -1.0 : rhs - lhs;
        if (excess > tol) {
          r.metric = false;
          if (!r.worst_violation || excess > r.worst_violation->magnitude) {
            r.worst_violation = ValidationReport::Violation{i, j, k, excess};
          }
        }
      }
    }
  }
  return r;
}

namespace {

json real_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

double real_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorKind::kParse, where + ": expected a number");
}

}  // namespace

std::string instance_to_json_text(const Instance& inst) {
  json doc;
  doc["n"] = inst.n();
  if (inst.coords()) {
    json pts = json::array();
    for (const Point& p : *inst.coords()) pts.push_back({p.x, p.y});
    doc["coords"] = std::move(pts);
  } else {
    json rows = json::array();
    for (int i = 0; i < inst.vertex_count(); ++i) {
      json row = json::array();
      for (int j = 0; j < inst.vertex_count(); ++j) row.push_back(real_to_json(inst.d(i, j)));
      rows.push_back(std::move(row));
    }
    doc["matrix"] = std::move(rows);
  }
  if (inst.fixed_costs()) doc["fixed_costs"] = *inst.fixed_costs();
  if (inst.seed()) doc["seed"] = *inst.seed();
  if (!inst.id().empty()) doc["id"] = inst.id();
  return doc.dump(1) + "\n";
}

Instance instance_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw Error(ErrorKind::kParse, "field 'n': missing or not an integer");
  }
  const int n = doc["n"].get<int>();
  if (n < 1) throw Error(ErrorKind::kParse, "field 'n': must be at least 1");
  const bool has_coords = doc.contains("coords");
  const bool has_matrix = doc.contains("matrix");
  if (has_coords == has_matrix) {
    throw Error(ErrorKind::kParse, "exactly one of 'coords' or 'matrix' is required");
  }
  std::optional<Instance> inst;
  if (has_coords) {
    const json& c = doc["coords"];
    if (!c.is_array()) throw Error(ErrorKind::kParse, "field 'coords': expected an array");
    if (c.size() != static_cast<std::size_t>(n) + 1) {
      throw Error(ErrorKind::kDimensionMismatch, "field 'coords': n=" + std::to_string(n) + " needs " +
                                                     std::to_string(n + 1) + " points, got " +
                                                     std::to_string(c.size()));
    }
    std::vector<Point> pts;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string where = "coords[" + std::to_string(i) + "]";
      if (!c[i].is_array() || c[i].size() != 2) throw Error(ErrorKind::kParse, where + ": expected [x, y]");
      pts.push_back({real_from_json(c[i][0], where), real_from_json(c[i][1], where)});
    }
    inst = Instance::from_coords(std::move(pts));
  } else {
    const json& m = doc["matrix"];
    if (!m.is_array()) throw Error(ErrorKind::kParse, "field 'matrix': expected an array");
    if (m.size() != static_cast<std::size_t>(n) + 1) {
      throw Error(ErrorKind::kDimensionMismatch, "field 'matrix': n=" + std::to_string(n) + " needs " +
                                                     std::to_string(n + 1) + " rows, got " +
                                                     std::to_string(m.size()));
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_array()) throw Error(ErrorKind::kParse, "matrix[" + std::to_string(i) + "]: expected an array");
      std::vector<double> row;
      for (std::size_t j = 0; j < m[i].size(); ++j) {
        row.push_back(real_from_json(m[i][j], "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      }
      rows.push_back(std::move(row));
    }
    inst = Instance::from_matrix(std::move(rows));
  }
  if (doc.contains("fixed_costs")) {
    const json& f = doc["fixed_costs"];
    if (!f.is_array()) throw Error(ErrorKind::kParse, "field 'fixed_costs': expected an array");
    std::vector<double> costs;
    for (std::size_t i = 0; i < f.size(); ++i) {
      costs.push_back(real_from_json(f[i], "fixed_costs[" + std::to_string(i) + "]"));
    }
    inst = inst->with_fixed_costs(std::move(costs));
  }
  std::string id;
  std::optional<std::uint64_t> seed;
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) throw Error(ErrorKind::kParse, "field 'id': expected a string");
    id = doc["id"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw Error(ErrorKind::kParse, "field 'seed': expected an integer");
    }
    seed = doc["seed"].get<std::uint64_t>();
  }
  return inst->with_metadata(std::move(id), seed);
}

Instance instance_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Point> pts;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 3) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 3 fields (id,x,y), got " +
                                         std::to_string(fields.size()));
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(fields[1], &used);
      const double y = std::stod(fields[2]);
      pts.push_back({x, y});
    } catch (const std::exception&) {
      if (pts.empty() && line_no == 1) continue;  // header row
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": x/y are not numbers");
    }
  }
  return Instance::from_coords(std::move(pts));
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".csv") return instance_from_csv_text(buf.str());
  return instance_from_json_text(buf.str());
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << instance_to_json_text(inst);
}

}  // namespace tsg
