#include "tsg/allocation.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tsg/error.hpp"

namespace tsg {

using nlohmann::json;

namespace {

bool is_shapley_method(const std::string& method) {
  return method == "exact" || method == "appro" || method == "subset";
}

std::vector<double> reals(const json& doc, const char* key) {
  std::vector<double> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_array()) throw Error(ErrorKind::kParse, std::string(key) + ": expected an array");
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw Error(ErrorKind::kParse, std::string(key) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Allocation fractionalize(Allocation a) {
  const double total = std::accumulate(a.absolute.begin(), a.absolute.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::kZeroTotal, "allocation has no positive total to normalise");
  a.fractional.resize(a.absolute.size());
  for (std::size_t i = 0; i < a.absolute.size(); ++i) a.fractional[i] = a.absolute[i] / total;
  return a;
}

std::string allocation_to_json_text(const Allocation& a) {
  json doc;
  doc["method"] = a.method;
  if (!a.instance_id.empty()) doc["instance_id"] = a.instance_id;
  if (a.seed) doc["seed"] = *a.seed;
  if (a.iterations) doc["iterations"] = *a.iterations;
  doc["absolute"] = a.absolute;
  doc["fractional"] = a.fractional;
  if (!a.raw.empty()) doc["raw"] = a.raw;
  if (a.total_cost) doc["total_cost"] = *a.total_cost;
  if (!a.warnings.empty()) doc["warnings"] = a.warnings;
  return doc.dump(1) + "\n";
}

Allocation allocation_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("allocation: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("method") || !doc["method"].is_string()) {
    throw Error(ErrorKind::kParse, "allocation: missing \"method\"");
  }
  Allocation a;
  a.method = doc["method"].get<std::string>();
  if (doc.contains("instance_id")) a.instance_id = doc["instance_id"].get<std::string>();
  if (doc.contains("seed")) a.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("iterations")) a.iterations = doc["iterations"].get<std::int64_t>();
  a.absolute = reals(doc, "absolute");
  a.fractional = reals(doc, "fractional");
  a.raw = reals(doc, "raw");
  if (doc.contains("total_cost")) a.total_cost = doc["total_cost"].get<double>();
  if (doc.contains("warnings")) a.warnings = doc["warnings"].get<std::vector<std::string>>();
  return a;
}

void write_allocation(const Allocation& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << allocation_to_json_text(a);
}

Allocation read_allocation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Allocation a = allocation_from_json_text(buf.str());
  const std::string where = path.string() + ": ";
  if (!a.fractional.empty() && a.fractional.size() != a.absolute.size()) {
    throw Error(ErrorKind::kDimensionMismatch, where + "absolute and fractional lengths differ");
  }
  if (!a.fractional.empty()) {
    const double s = std::accumulate(a.fractional.begin(), a.fractional.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorKind::kInvalidArgument, where + "fractional does not sum to 1");
  }
  if (is_shapley_method(a.method) && a.total_cost) {
    const double s = std::accumulate(a.absolute.begin(), a.absolute.end(), 0.0);
    if (std::abs(s - *a.total_cost) > 1e-9 * std::max(1.0, std::abs(*a.total_cost))) {
      throw Error(ErrorKind::kInvalidArgument, where + "absolute values do not sum to total_cost");
    }
  }
  return a;
}

}  // namespace tsg
