#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsg/allocation.hpp"
#include "tsg/error.hpp"
#include "tsg/eval.hpp"
#include "tsg/instance.hpp"
#include "tsg/proxies.hpp"
#include "tsg/rng.hpp"
#include "tsg/shapley.hpp"
#include "tsg/tsp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr int kExitError = 2;

using Clock = std::chrono::steady_clock;

// Records what a command did; written beside its outputs.
class Manifest {
 public:
  explicit Manifest(std::string command) { doc_["command"] = std::move(command); }

  json& params() { return doc_["parameters"]; }
  void seed(const std::string& key, std::uint64_t value) { doc_["seeds"][key] = value; }
  void phase(const std::string& name, Clock::time_point start) {
    doc_["wall_clock_seconds"][name] = std::chrono::duration<double>(Clock::now() - start).count();
  }
  void output(const std::string& path) { doc_["outputs"].push_back(path); }
  void failure(const std::string& item, const std::string& message) {
    doc_["failures"].push_back({{"item", item}, {"error", message}});
  }
  void note(const std::string& key, json value) { doc_["notes"][key] = std::move(value); }
  bool failed() const { return doc_.contains("failures"); }

  void write(const fs::path& dir) {
    doc_["tool_version"] = TSG_VERSION;
    std::sort(doc_["outputs"].begin(), doc_["outputs"].end());
    std::ofstream(dir / kManifestName) << doc_.dump(1) << "\n";
  }

 private:
  json doc_ = json::object();
};

// Stable string hash for per-instance seed derivation.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw tsg::Error(tsg::ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

// JSON output tagged with the manifest that produced it.
std::string tagged(const std::string& json_text) {
  json doc = json::parse(json_text);
  doc["manifest"] = kManifestName;
  return doc.dump(1) + "\n";
}

// A file, or every JSON file of a directory except the manifest, by name.
std::vector<fs::path> json_inputs(const fs::path& in) {
  if (!fs::exists(in)) throw tsg::Error(tsg::ErrorKind::kIo, in.string() + " does not exist");
  if (!fs::is_directory(in)) return {in};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != kManifestName) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct IntRange {
  int lo = 0;
  int hi = 0;
};

IntRange parse_range(const std::string& text) {
  IntRange r;
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(text);
    } else {
      r.lo = std::stoi(text.substr(0, dots));
      r.hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "expected N or LO..HI, got '" + text + "'");
  }
  if (r.lo < 1 || r.hi < r.lo) throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "bad range '" + text + "'");
  return r;
}

// Per-item failures are recorded next to the outputs and in the manifest.
void record_failure(Manifest& m, std::mutex& mu, const fs::path& out_dir, const std::string& stem,
                    const std::string& message) {
  std::lock_guard<std::mutex> lock(mu);
  write_text(out_dir / (stem + ".failed"), message + "\n");
  m.failure(stem, message);
  std::cerr << stem << ": " << message << "\n";
}

// gen

struct GenArgs {
  std::string n = "10";
  int per_n = 20;
  std::uint64_t seed = 7;
  double square = 1000.0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const auto start = Clock::now();
  const IntRange r = parse_range(a.n);
  fs::create_directories(a.out);
  Manifest m("gen");
  m.params() = {{"n", a.n}, {"per_n", a.per_n}, {"square", a.square}, {"out", a.out}};
  m.seed("corpus", a.seed);
  for (int n = r.lo; n <= r.hi; ++n) {
    for (int k = 0; k < a.per_n; ++k) {
      const std::uint64_t s = tsg::derive_seed(tsg::derive_seed(a.seed, static_cast<std::uint64_t>(n)),
                                               static_cast<std::uint64_t>(k));
      const tsg::Instance inst = tsg::generate_euclidean(n, s, a.square);
      char name[32];
      std::snprintf(name, sizeof name, "n%02d_%03d.json", n, k);
      write_text(fs::path(a.out) / name, tagged(tsg::instance_to_json_text(inst)));
      m.output(name);
    }
  }
  m.phase("generate", start);
  m.write(a.out);
  return 0;
}

// baseline

struct BaselineArgs {
  std::string in;
  std::string out;
  std::string method = "auto";
  std::int64_t iters = tsg::kDefaultIterations;
  std::uint64_t seed = 1;
  int threads = 1;
};

tsg::Allocation compute_baseline(const tsg::Instance& inst, const BaselineArgs& a) {
  tsg::CharCache cache;
  tsg::CharacteristicFunction c(inst, tsg::SolverKind::kExact, cache);
  std::string method = a.method;
  if (method == "auto") method = inst.n() <= tsg::kExactShapleyLimit ? "exact" : "appro";
  const std::uint64_t seed = tsg::derive_seed(a.seed, fnv1a(inst.id()));
  if (method == "exact") return tsg::exact_shapley(c);
  if (method == "appro") return tsg::appro_shapley(c, a.iters, seed);
  if (method == "subset") return tsg::subset_shapley(c, a.iters, seed);
  throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "unknown baseline method '" + a.method + "'");
}

int run_baseline(const BaselineArgs& a) {
  const auto start = Clock::now();
  const auto inputs = json_inputs(a.in);
  fs::create_directories(a.out);
  Manifest m("baseline");
  m.params() = {{"in", a.in}, {"out", a.out}, {"method", a.method}, {"iters", a.iters}, {"threads", a.threads},
                {"exact_limit", tsg::kExactShapleyLimit}};
  m.seed("baseline", a.seed);
  std::mutex mu;
  std::vector<std::string> chosen(inputs.size());
  parallel_for(inputs.size(), a.threads, [&](std::size_t i) {
    const std::string stem = inputs[i].stem().string();
    try {
      const tsg::Instance inst = tsg::read_instance(inputs[i]);
      const tsg::Allocation alloc = compute_baseline(inst, a);
      write_text(fs::path(a.out) / (stem + ".json"), tagged(tsg::allocation_to_json_text(alloc)));
      // Re-read to check efficiency on load.
      tsg::read_allocation(fs::path(a.out) / (stem + ".json"));
      chosen[i] = alloc.method;
    } catch (const std::exception& e) {
      record_failure(m, mu, a.out, stem, e.what());
    }
  });
  json methods = json::object();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (chosen[i].empty()) continue;
    methods[inputs[i].stem().string()] = chosen[i];
    m.output(inputs[i].stem().string() + ".json");
  }
  m.note("method_per_instance", methods);
  m.phase("baseline", start);
  m.write(a.out);
  return m.failed() ? kExitError : 0;
}

// proxy

struct ProxyArgs {
  std::string in;
  std::string out;
  std::vector<std::string> methods{"blend"};
  double lambda = tsg::kDefaultLambda;
  std::int64_t iters = tsg::kDefaultIterations;
  std::uint64_t seed = 2;
  int threads = 1;
};

int run_proxy_cmd(const ProxyArgs& a) {
  const auto start = Clock::now();
  std::vector<std::string> methods;
  for (const auto& name : a.methods) {
    if (name == "all") {
      methods = tsg::proxy_names();
      break;
    }
    const auto& known = tsg::proxy_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "unknown proxy '" + name + "'");
    }
    methods.push_back(name);
  }
  const auto inputs = json_inputs(a.in);
  for (const auto& name : methods) fs::create_directories(fs::path(a.out) / name);
  Manifest m("proxy");
  m.params() = {{"in", a.in}, {"out", a.out},         {"methods", methods},
                {"lambda", a.lambda}, {"iters", a.iters}, {"threads", a.threads}};
  m.seed("proxy", a.seed);
  std::mutex mu;
  std::vector<std::vector<std::string>> written(inputs.size());
  parallel_for(inputs.size(), a.threads, [&](std::size_t i) {
    const std::string stem = inputs[i].stem().string();
    try {
      const tsg::Instance inst = tsg::read_instance(inputs[i]);
      tsg::ProxyOptions opts;
      opts.lambda = a.lambda;
      opts.iterations = a.iters;
      opts.seed = tsg::derive_seed(a.seed, fnv1a(inst.id()));
      tsg::CharCache cache;
      for (const auto& name : methods) {
        const tsg::Allocation alloc = tsg::run_proxy(name, inst, opts, cache);
        write_text(fs::path(a.out) / name / (stem + ".json"), tagged(tsg::allocation_to_json_text(alloc)));
        written[i].push_back(name + "/" + stem + ".json");
      }
    } catch (const std::exception& e) {
      record_failure(m, mu, a.out, stem, e.what());
    }
  });
  for (const auto& files : written) {
    for (const auto& f : files) m.output(f);
  }
  m.phase("proxy", start);
  m.write(a.out);
  return m.failed() ? kExitError : 0;
}

// eval

std::map<std::string, std::pair<fs::path, tsg::Allocation>> load_by_id(const std::string& in) {
  std::map<std::string, std::pair<fs::path, tsg::Allocation>> out;
  for (const auto& path : json_inputs(in)) {
    tsg::Allocation a = tsg::read_allocation(path);
    const std::string id = a.instance_id;
    if (!out.emplace(id, std::make_pair(path, std::move(a))).second) {
      throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "instance id '" + id + "' appears twice in " + in);
    }
  }
  return out;
}

struct EvalArgs {
  std::string baseline;
  std::vector<std::string> proxies;
  std::string out;
};

std::string summary_csv_header() {
  return "proxy,count,rmse_mean,rmse_stdev,l2_mean,l2_stdev,tau_mean,tau_stdev,p_median,p_max,top1_fraction,"
         "significant";
}

std::string summary_csv_row(const std::string& proxy, const tsg::CorpusSummary& s) {
  std::ostringstream os;
  os.precision(17);
  os << proxy << "," << s.count << "," << s.rmse_mean << "," << s.rmse_stdev << "," << s.l2_mean << ","
     << s.l2_stdev << "," << s.tau_mean << "," << s.tau_stdev << "," << s.p_median << "," << s.p_max << ","
     << s.top1_fraction << "," << s.significant;
  return os.str();
}

int run_eval(const EvalArgs& a) {
  const auto start = Clock::now();
  fs::create_directories(fs::path(a.out) / "reports");
  Manifest m("eval");
  m.params() = {{"baseline", a.baseline}, {"proxies", a.proxies}, {"out", a.out}};
  const auto baselines = load_by_id(a.baseline);
  std::string rows = tsg::report_csv_header() + "\n";
  std::string summary_rows = summary_csv_header() + "\n";
  json summaries = json::object();
  for (const auto& dir : a.proxies) {
    const auto proxies = load_by_id(dir);
    std::vector<tsg::EvalReport> reports;
    std::string method;
    for (const auto& [id, entry] : proxies) {
      const auto base = baselines.find(id);
      if (base == baselines.end()) {
        throw tsg::Error(tsg::ErrorKind::kInvalidArgument,
                         "no baseline for instance id '" + id + "' (" + entry.first.string() + ")");
      }
      const tsg::EvalReport r = tsg::evaluate(base->second.second, entry.second);
      method = r.proxy;
      const std::string name = "reports/" + entry.first.stem().string() + "." + r.proxy + ".json";
      write_text(fs::path(a.out) / name, tagged(tsg::report_to_json_text(r)));
      m.output(name);
      rows += tsg::report_csv_row(r) + "\n";
      reports.push_back(r);
    }
    if (reports.empty()) continue;
    const tsg::CorpusSummary s = tsg::aggregate_corpus(reports);
    summaries[method] = json::parse(tsg::summary_to_json_text(s));
    summary_rows += summary_csv_row(method, s) + "\n";
  }
  write_text(fs::path(a.out) / "reports.csv", rows);
  write_text(fs::path(a.out) / "summary.csv", summary_rows);
  json doc = {{"summaries", summaries},
              {"p_value_method", "normal approximation z = 3 tau sqrt(n(n-1))/sqrt(2(2n+5)), two-tailed; "
                                 "exact permutation null below 8 locations"}};
  write_text(fs::path(a.out) / "summary.json", tagged(doc.dump(1)));
  for (const char* f : {"reports.csv", "summary.csv", "summary.json"}) m.output(f);
  m.phase("eval", start);
  m.write(a.out);
  return 0;
}

// sweep-blend

struct SweepArgs {
  std::string instances;
  std::string baseline;
  std::string out;
  double step = 0.1;
  int threads = 1;
};

int run_sweep(const SweepArgs& a) {
  const auto start = Clock::now();
  if (!(a.step > 0.0) || a.step > 1.0) throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "step must be in (0, 1]");
  fs::create_directories(a.out);
  Manifest m("sweep-blend");
  m.params() = {{"instances", a.instances}, {"baseline", a.baseline}, {"out", a.out}, {"step", a.step},
                {"threads", a.threads}};
  const auto baselines = load_by_id(a.baseline);
  const auto inputs = json_inputs(a.instances);
  std::vector<tsg::BlendInputs> corpus(inputs.size());
  std::vector<char> ok(inputs.size(), 0);
  std::mutex mu;
  parallel_for(inputs.size(), a.threads, [&](std::size_t i) {
    const std::string stem = inputs[i].stem().string();
    try {
      const tsg::Instance inst = tsg::read_instance(inputs[i]);
      const auto base = baselines.find(inst.id());
      if (base == baselines.end()) {
        throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "no baseline for instance id '" + inst.id() + "'");
      }
      corpus[i].baseline = base->second.second;
      corpus[i].moat = tsg::moat_proxy(inst);
      corpus[i].depot = tsg::depot_proxy(inst);
      ok[i] = 1;
    } catch (const std::exception& e) {
      record_failure(m, mu, a.out, stem, e.what());
    }
  });
  std::vector<tsg::BlendInputs> good;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (ok[i]) good.push_back(std::move(corpus[i]));
  }
  std::vector<double> grid;
  const int steps = static_cast<int>(std::llround(1.0 / a.step));
  for (int k = 0; k <= steps; ++k) grid.push_back(std::min(1.0, k * a.step));
  if (grid.back() < 1.0) grid.push_back(1.0);
  const auto rows = tsg::sweep_blend(good, grid);
  std::ostringstream os;
  os.precision(17);
  os << "lambda,mean_max_error,mean_error,rmse\n";
  for (const auto& r : rows) os << r.lambda << "," << r.mean_max_error << "," << r.mean_error << "," << r.rmse << "\n";
  write_text(fs::path(a.out) / "sweep.csv", os.str());
  m.output("sweep.csv");
  m.phase("sweep", start);
  m.write(a.out);
  return m.failed() ? kExitError : 0;
}

// converge

struct ConvergeArgs {
  int n = 10;
  int count = 50;
  std::int64_t max_iters = 5000;
  std::vector<std::int64_t> checkpoints{10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
  std::uint64_t seed = 3;
  std::string out;
  int threads = 1;
};

double mean_percent_error(const std::vector<double>& exact, const std::vector<double>& est) {
  double s = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) s += std::abs(est[i] - exact[i]) / exact[i] * 100.0;
  return s / static_cast<double>(exact.size());
}

int run_converge(const ConvergeArgs& a) {
  const auto start = Clock::now();
  if (a.n > tsg::kExactShapleyLimit) {
    throw tsg::Error(tsg::ErrorKind::kInvalidArgument, "converge needs an exact reference; n must be at most 15");
  }
  std::vector<std::int64_t> marks;
  for (auto m : a.checkpoints) {
    if (m >= 1 && m <= a.max_iters) marks.push_back(m);
  }
  if (marks.empty() || marks.back() != a.max_iters) marks.push_back(a.max_iters);
  fs::create_directories(a.out);
  Manifest man("converge");
  man.params() = {{"n", a.n}, {"count", a.count}, {"max_iters", a.max_iters}, {"checkpoints", marks},
                  {"out", a.out}, {"threads", a.threads}};
  man.seed("converge", a.seed);
  // rows[g][method][mark]
  std::vector<std::array<std::vector<double>, 2>> err(static_cast<std::size_t>(a.count));
  std::vector<std::string> ids(static_cast<std::size_t>(a.count));
  parallel_for(static_cast<std::size_t>(a.count), a.threads, [&](std::size_t g) {
    const tsg::Instance inst = tsg::generate_euclidean(a.n, tsg::derive_seed(a.seed, g));
    ids[g] = inst.id();
    tsg::CharCache cache;
    tsg::CharacteristicFunction c(inst, tsg::SolverKind::kExact, cache);
    const auto exact = tsg::exact_shapley(c).fractional;
    const std::uint64_t s = tsg::derive_seed(a.seed, 1000000 + g);
    for (auto m : marks) {
      err[g][0].push_back(mean_percent_error(exact, tsg::appro_shapley(c, m, s).fractional));
      err[g][1].push_back(mean_percent_error(exact, tsg::subset_shapley(c, m, s).fractional));
    }
  });
  std::ostringstream os, mean;
  os.precision(17);
  mean.precision(17);
  os << "instance_id,method,m,mean_percent_error\n";
  mean << "method,m,corpus_mean_percent_error\n";
  const char* names[2] = {"appro", "subset"};
  for (int k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < marks.size(); ++j) {
      double s = 0.0;
      for (std::size_t g = 0; g < err.size(); ++g) {
        os << ids[g] << "," << names[k] << "," << marks[j] << "," << err[g][static_cast<std::size_t>(k)][j] << "\n";
        s += err[g][static_cast<std::size_t>(k)][j];
      }
      mean << names[k] << "," << marks[j] << "," << s / static_cast<double>(err.size()) << "\n";
    }
  }
  write_text(fs::path(a.out) / "converge.csv", os.str());
  write_text(fs::path(a.out) / "converge_mean.csv", mean.str());
  man.output("converge.csv");
  man.output("converge_mean.csv");
  man.phase("converge", start);
  man.write(a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost allocation for travelling salesman games: baselines, proxies and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TSG_VERSION);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random Euclidean corpus");
  g->add_option("--n", gen.n, "Location count or range LO..HI")->capture_default_str();
  g->add_option("--per-n", gen.per_n, "Instances per location count")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Corpus seed")->capture_default_str();
  g->add_option("--square", gen.square, "Side of the square")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "Output directory")->required();

  BaselineArgs base;
  auto* b = app.add_subcommand("baseline", "Shapley baseline allocations");
  b->add_option("--in", base.in, "Instance file or directory")->required();
  b->add_option("--out", base.out, "Output directory")->required();
  b->add_option("--method", base.method, "auto, exact, appro or subset")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "exact", "appro", "subset"}));
  b->add_option("--iters", base.iters, "Sampling iterations")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--seed", base.seed, "Sampling seed")->capture_default_str();
  b->add_option("--threads", base.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  ProxyArgs prox;
  auto* p = app.add_subcommand("proxy", "Proxy allocations");
  p->add_option("--in", prox.in, "Instance file or directory")->required();
  p->add_option("--out", prox.out, "Output directory (one subdirectory per method)")->required();
  p->add_option("--method", prox.methods, "Proxy names or 'all'")->capture_default_str()->delimiter(',');
  p->add_option("--lambda", prox.lambda, "Blend weight on the moat proxy")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  p->add_option("--iters", prox.iters, "Christofides sampling iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  p->add_option("--seed", prox.seed, "Christofides sampling seed")->capture_default_str();
  p->add_option("--threads", prox.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Compare proxies against a baseline");
  e->add_option("--baseline", ev.baseline, "Baseline allocation file or directory")->required();
  e->add_option("--proxy", ev.proxies, "Proxy allocation file or directory (repeatable)")->required();
  e->add_option("--out", ev.out, "Output directory")->required();

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep-blend", "Blend weight sweep");
  s->add_option("--instances", sw.instances, "Instance file or directory")->required();
  s->add_option("--baseline", sw.baseline, "Baseline allocation file or directory")->required();
  s->add_option("--out", sw.out, "Output directory")->required();
  s->add_option("--step", sw.step, "Grid step on [0, 1]")->capture_default_str();
  s->add_option("--threads", sw.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  ConvergeArgs cv;
  auto* c = app.add_subcommand("converge", "ApproShapley vs SubsetShapley error against iterations");
  c->add_option("--n", cv.n, "Locations per game")->capture_default_str()->check(CLI::Range(1, 15));
  c->add_option("--count", cv.count, "Games")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--max-iters", cv.max_iters, "Largest iteration count")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--checkpoints", cv.checkpoints, "Iteration counts to report")->capture_default_str()->delimiter(',');
  c->add_option("--seed", cv.seed, "Corpus and sampling seed")->capture_default_str();
  c->add_option("--out", cv.out, "Output directory")->required();
  c->add_option("--threads", cv.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_gen(gen);
    if (*b) return run_baseline(base);
    if (*p) return run_proxy_cmd(prox);
    if (*e) return run_eval(ev);
    if (*s) return run_sweep(sw);
    if (*c) return run_converge(cv);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return 0;
}
