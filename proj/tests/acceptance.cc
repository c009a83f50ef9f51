// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairbound/data_pipeline.h"
#include "fairbound/feasible_set.h"
#include "fairbound/recipe.h"
#include "fairbound/simulation.h"
#include "fairbound/structural.h"
#include "oracles.h"

#ifdef FAIRBOUND_HAVE_CLI
#include <nlohmann/json.hpp>

#include "cli.h"
#endif

namespace fs = std::filesystem;
using namespace fairbound;

namespace {

const fs::path kData = FAIRBOUND_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// The desk study is shared by the first four checks.
const StudyResult& DeskStudy() {
  static const StudyResult study = [] {
    ScenarioConfig cfg = ScenarioConfig::Desk();
    cfg.seed = RngSeed{7};
    return RunStudy(cfg, 1);
  }();
  return study;
}

double desk_seconds = 0.0;

Outcome Coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  const StudyResult& s = DeskStudy();
  desk_seconds = Seconds(t0);
  std::size_t n = 0, dd = 0, di = 0;
  for (const ScenarioResult& r : s.scenarios) {
    if (r.excluded || r.mode != MarginalMode::kConsistent) continue;
    ++n;
    dd += r.dd.contains_truth;
    di += r.di.contains_truth;
  }
  return {n > 0 && dd == n && di == n && desk_seconds < 60.0,
          Fmt("consistent scenarios %zu, DD covered %zu, DI covered %zu, study %.1f s", n, dd,
              di, desk_seconds)};
}

Outcome Bias() {
  const AggregateReport& r = DeskStudy().report;
  const double dd = r.diff_dd.mean;
  const double di = r.diff_di.mean;
  return {std::abs(dd) <= 0.05 && std::abs(di) <= 0.15,
          Fmt("mean(true - estimate) DD %.4f (sd %.3f), DI %.4f (sd %.3f)", dd, r.diff_dd.std,
              di, r.diff_di.std)};
}

Outcome RangeStability() {
  const AggregateReport& r = DeskStudy().report;
  double lo = 1e300, hi = 0.0;
  bool in_band = true;
  std::string per_bin;
  for (const BinStats& b : r.bins) {
    if (b.n_scenarios == 0) continue;
    lo = std::min(lo, b.avg_range_dd);
    hi = std::max(hi, b.avg_range_dd);
    in_band = in_band && b.avg_range_dd >= 0.3 && b.avg_range_dd <= 0.8;
    per_bin += Fmt(" %s:%.3f", b.label.c_str(), b.avg_range_dd);
  }
  const double ratio = hi / lo;
  return {in_band && ratio <= 1.5, Fmt("DD range by KL bin%s, max/min %.3f", per_bin.c_str(), ratio)};
}

Outcome FeasibleSize() {
  std::size_t largest = 0;
  for (const ScenarioResult& r : DeskStudy().scenarios) largest = std::max(largest, r.n_feasible);
  FeasibleSpec spec;
  spec.internal = Marginal2::Uniform(MarginalRole::kInternal);
  spec.external = Marginal2::Uniform(MarginalRole::kExternal);
  const std::size_t interior = Enumerate(spec).size();
  return {largest <= 10000 && interior == 10000,
          Fmt("largest scenario set %zu, interior box %zu", largest, interior)};
}

Outcome FreeParams() {
  const auto a = CountFreeParams(1, 1, 1, MarginalMode::kConsistent);
  const auto b = CountFreeParams(1, 1, 1, MarginalMode::kInconsistent);
  const auto c = CountFreeParams(2, 1, 2, MarginalMode::kInconsistent);
  return {a == 2 && b == 2 && c == 18,
          Fmt("(1,1,1) consistent %llu, inconsistent %llu; (2,1,2) inconsistent %llu",
              static_cast<unsigned long long>(a), static_cast<unsigned long long>(b),
              static_cast<unsigned long long>(c))};
}

// Each sample g yields a spec from its own marginals: exact for even
// indices, rounded to three decimals (so g is only near-feasible) for odd
// ones. Near-feasibility and distance are measured with test-side code.
Outcome OracleEquivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2026);
  const auto round3 = [](oracle::Pair p) {
    double z = 0;
    for (double& x : p) {
      x = std::round(x * 1000.0) / 1000.0;
      z += x;
    }
    for (double& x : p) x /= z;
    return p;
  };
  int tested = 0, near = 0, ok = 0;
  double worst_excess = -1e300;
  for (int t = 0; t < 10000; ++t) {
    const oracle::Joint g = oracle::UniformSimplex<8>(rng);
    oracle::Pair in = oracle::InternalOf(g);
    oracle::Pair ex = oracle::ExternalOf(g);
    if (t % 2 == 1) {
      in = round3(in);
      ex = round3(ex);
    }
    FeasibleSpec spec;
    spec.internal = Marginal2::FromProbabilities(in, MarginalRole::kInternal);
    spec.external = Marginal2::FromProbabilities(ex, MarginalRole::kExternal);
    spec.mode = DetectMode(spec.internal, spec.external);
    const bool consistent = spec.mode == MarginalMode::kConsistent;
    ++tested;
    if (oracle::MaxResidual(g, in, ex, consistent) > 1e-3) continue;
    ++near;
    FeasibleSet set;
    try {
      set = Enumerate(spec);
    } catch (const Error&) {
      continue;  // counts as a miss
    }
    const double width = std::max(set.box.c_width(), set.box.k_width());
    const double bound = 2.0 * width / 99.0 + 1e-3;
    double best = 1e300;
    for (const BinaryJoint3& j : set.joints) {
      double d = 0;
      for (int i = 0; i < 8; ++i) d = std::max(d, std::abs(j[i] - g[i]));
      best = std::min(best, d);
    }
    worst_excess = std::max(worst_excess, best - bound);
    ok += best <= bound;
  }
  const double secs = Seconds(t0);
  return {near > 0 && ok == near && secs < 10.0,
          Fmt("%d samples, %d near-feasible, %d within bound (worst margin %.2e), %.1f s", tested,
              near, ok, worst_excess, secs)};
}

std::vector<std::size_t> Iota(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> r;
  for (std::size_t i = lo; i < hi; ++i) r.push_back(i);
  return r;
}

Outcome EmProperties() {
  const std::vector<std::string> bits = {"0", "1"};
  const VariablePartition part{{"a", "a2"}, {"x"}, {"b"}};
  // Monotone objective on 20 dataset pairs.
  double worst_drop = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    LatentNBModel src;
    src.K = 3;
    src.pi = SampleDirichlet(3, 1.0, RngSeed{t});
    src.variables = {{"a", bits}, {"a2", {"p", "q", "r"}}, {"x", bits}, {"b", {"u", "v", "w"}}};
    for (std::size_t v = 0; v < src.variables.size(); ++v) {
      const std::size_t M = src.variables[v].arity();
      std::vector<double> cond(M * 3);
      for (int k = 0; k < 3; ++k) {
        const auto col = SampleDirichlet(M, 1.0, DeriveSeed(RngSeed{t}, 10 + v, k));
        for (std::size_t m = 0; m < M; ++m) cond[m * 3 + k] = col[m];
      }
      src.cond.push_back(cond);
    }
    const CategoricalDataset all = SampleModel(src, 600, RngSeed{100 + t});
    const std::vector<std::string> v1 = {"a", "a2", "b"}, v2 = {"x", "b"};
    const CategoricalDataset d1 = all.SelectRows(Iota(0, 300)).Project(v1);
    const CategoricalDataset d2 = all.SelectRows(Iota(300, 600)).Project(v2);
    EMConfig cfg;
    cfg.K = 3;
    cfg.seed = RngSeed{t};
    const EMFit fit = FitLatentNB(d1, d2, part, cfg);
    for (const auto& trace : fit.traces) {
      for (std::size_t i = 1; i < trace.size(); ++i) {
        worst_drop = std::max(worst_drop, trace[i - 1] - trace[i]);
      }
    }
  }
  // K = 1 against pooled frequencies.
  LatentNBModel hand;
  hand.K = 2;
  hand.pi = {0.3, 0.7};
  hand.variables = {{"a", bits}, {"a2", {"p", "q", "r"}}, {"x", bits}, {"b", {"u", "v", "w"}}};
  hand.cond = {{0.8, 0.1, 0.2, 0.9},
               {0.2, 0.5, 0.3, 0.1, 0.5, 0.4},
               {0.5, 0.25, 0.5, 0.75},
               {0.5, 0.1, 0.3, 0.1, 0.2, 0.8}};
  const CategoricalDataset all = SampleModel(hand, 1000, RngSeed{5});
  const std::vector<std::string> v1 = {"a", "a2", "b"}, v2 = {"x", "b"};
  const CategoricalDataset d1 = all.SelectRows(Iota(0, 500)).Project(v1);
  const CategoricalDataset d2 = all.SelectRows(Iota(500, 1000)).Project(v2);
  EMConfig one;
  one.K = 1;
  const LatentNBModel m1 = FitLatentNB(d1, d2, part, one).model;
  double k1_err = 0.0;
  const auto freq = [](const CategoricalDataset& d, const std::string& v, int level) {
    double c = 0;
    for (std::size_t r = 0; r < d.num_rows(); ++r) c += d.at(r, d.IndexOf(v)) == level;
    return c;
  };
  for (std::size_t v = 0; v < m1.variables.size(); ++v) {
    const std::string& name = m1.variables[v].name;
    for (int lv = 0; lv < static_cast<int>(m1.variables[v].arity()); ++lv) {
      double expected;
      if (name == "b") {
        expected = (freq(d1, name, lv) + freq(d2, name, lv)) / 1000.0;
      } else if (name == "x") {
        expected = freq(d2, name, lv) / 500.0;
      } else {
        expected = freq(d1, name, lv) / 500.0;
      }
      k1_err = std::max(k1_err, std::abs(m1.Cond(v, lv, 0) - expected));
    }
  }
  // Two well separated classes.
  LatentNBModel two;
  two.K = 2;
  two.pi = {0.4, 0.6};
  const std::vector<double> hi = {0.85, 0.8, 0.9, 0.8, 0.85, 0.9, 0.8};
  std::vector<std::string> names;
  for (std::size_t v = 0; v < hi.size(); ++v) {
    names.push_back("v" + std::to_string(v));
    two.variables.push_back({names.back(), bits});
    two.cond.push_back({1 - hi[v], hi[v], hi[v], 1 - hi[v]});
  }
  const VariablePartition p2{{"v0", "v1", "v2"}, {"v3", "v4"}, {"v5", "v6"}};
  const CategoricalDataset s2 = SampleModel(two, 20000, RngSeed{17});
  const std::vector<std::string> w1 = {"v0", "v1", "v2", "v5", "v6"}, w2 = {"v3", "v4", "v5", "v6"};
  EMConfig cfg2;
  cfg2.K = 2;
  const EMFit fit2 = FitLatentNB(s2.SelectRows(Iota(0, 10000)).Project(w1),
                                 s2.SelectRows(Iota(10000, 20000)).Project(w2), p2, cfg2);
  const double tv = TotalVariation(ModelJoint(fit2.model, names), ModelJoint(two, names));
  return {worst_drop <= 1e-10 && k1_err <= 1e-9 && tv <= 0.05,
          Fmt("largest objective drop %.2e, K=1 max error %.2e, two-class TV %.4f", worst_drop,
              k1_err, tv)};
}

#ifdef FAIRBOUND_HAVE_CLI
int Cli(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream out, e;
  const int code = cli::RunCli(args, out, e);
  if (err) *err = e.str();
  return code;
}

nlohmann::json ReadJson(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string ReadText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& Work() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "fairbound_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::vector<std::string> ExperimentArgs(const std::string& dataset, const std::string& method,
                                        int seed, const fs::path& out) {
  return {"experiment", "--recipe", (kData / "recipes" / (dataset + ".json")).string(),
          "--split", (kData / "splits" / (dataset + ".json")).string(), "--method", method,
          "--seed", std::to_string(seed), "--out-dir", out.string()};
}

// abs_diff of DI for one run, or NaN on failure.
double ExperimentDiDiff(const std::string& dataset, const std::string& method, int seed) {
  const fs::path out = Work() / (dataset + "_" + method + "_" + std::to_string(seed));
  std::string err;
  if (Cli(ExperimentArgs(dataset, method, seed, out), &err) != 0) {
    std::fprintf(stderr, "%s", err.c_str());
    return std::nan("");
  }
  return ReadJson(out / "report.json")["DI"]["abs_diff"].get<double>();
}

Outcome RealData() {
  bool pass = true;
  std::string detail = "COMPAS DI abs_diff";
  for (const std::string method : {"latent", "marginal"}) {
    double worst = 0.0;
    int worst_seed = 0;
    for (int seed = 0; seed < 5; ++seed) {
      const double d = ExperimentDiDiff("compas", method, seed);
      if (!(d <= worst) || std::isnan(d)) {
        worst = d;
        worst_seed = seed;
      }
    }
    pass = pass && worst <= 0.05;
    detail += Fmt(" %s max %.4f (seed %d);", method.c_str(), worst, worst_seed);
  }
  const double lat = ExperimentDiDiff("adult", "latent", 0);
  const double mar = ExperimentDiDiff("adult", "marginal", 0);
  pass = pass && mar <= lat;
  detail += Fmt(" Adult latent %.4f vs marginal %.4f", lat, mar);
  return {pass, detail};
}

Outcome Determinism() {
  const fs::path base = Work() / "determinism";
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"simulate", {"simulate", "--desk", "--seed", "11"}},
      {"experiment_feasible", ExperimentArgs("adult", "feasible", 3, "")},
      {"experiment_latent", ExperimentArgs("compas", "latent", 3, "")}};
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& [name, args] : runs) {
    std::vector<fs::path> dirs;
    for (const char* rep : {"a", "b"}) {
      std::vector<std::string> a = args;
      const fs::path out = base / name / rep;
      if (a.back().empty()) {
        a.back() = out.string();
      } else {
        a.insert(a.end(), {"--out-dir", out.string()});
      }
      if (name == "experiment_latent") {
        a.insert(a.end(), {"--bootstrap", "200"});
      }
      if (Cli(a) != 0) return {false, name + " failed to run"};
      dirs.push_back(out);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string file = entry.path().filename().string();
      if (file == "manifest.json") continue;  // carries wall-clock timestamps
      ++compared;
      if (ReadText(entry.path()) != ReadText(dirs[1] / file)) differing.push_back(name + "/" + file);
    }
  }
  std::string detail = Fmt("%zu output files compared byte for byte", compared);
  for (const std::string& d : differing) detail += ", differs: " + d;
  return {compared > 0 && differing.empty(), detail};
}
#else
Outcome RealData() { return {false, "built without the command-line tool"}; }
Outcome Determinism() { return {false, "built without the command-line tool"}; }
#endif

Outcome Containment() {
  bool pass = true;
  std::string detail;
  for (const std::string name : {"adult", "compas", "german"}) {
    const DatasetRecipe recipe = LoadRecipe(kData / "recipes" / (name + ".json"));
    const CategoricalDataset data = Ingest(recipe).data;
    SplitSpec spec = LoadSplitSpec(kData / "splits" / (name + ".json"));
    spec.Resolve(recipe, data);
    const FeasibleExperimentResult r = RunFeasibleExperiment(data, spec);
    const auto inside = [](double v, const FairnessSummary& s) {
      return v >= s.min && v <= s.max;
    };
    const bool ok = inside(*r.dd.true_value, r.dd) && inside(r.latent.dd, r.dd) &&
                    inside(r.marginal.dd, r.dd) && inside(*r.di.true_value, r.di) &&
                    inside(r.latent.di, r.di) && inside(r.marginal.di, r.di);
    pass = pass && ok;
    detail += Fmt("%s DD [%.3f, %.3f] truth %.3f latent %.3f marginal %.3f, DI [%.3f, %.3f] "
                  "truth %.3f latent %.3f marginal %.3f%s; ",
                  name.c_str(), r.dd.min, r.dd.max, *r.dd.true_value, r.latent.dd,
                  r.marginal.dd, r.di.min, r.di.max, *r.di.true_value, r.latent.di,
                  r.marginal.di, ok ? "" : " (outside)");
  }
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "coverage on consistent scenarios", Coverage},
      {2, "bias of the mean estimate", Bias},
      {3, "range stability across KL bins", RangeStability},
      {4, "feasible-set size", FeasibleSize},
      {5, "free-parameter counts", FreeParams},
      {6, "oracle equivalence", OracleEquivalence},
      {7, "EM properties", EmProperties},
      {8, "real-data structural estimates", RealData},
      {9, "containment of point estimates", Containment},
      {10, "determinism", Determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
