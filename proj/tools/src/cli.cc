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


#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairbound/data_pipeline.h"
#include "fairbound/dataset.h"
#include "fairbound/fairness.h"
#include "fairbound/feasible_set.h"
#include "fairbound/recipe.h"
#include "fairbound/serialization.h"
#include "fairbound/simulation.h"
#include "fairbound/structural.h"
#include "manifest.h"

namespace fairbound::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Seed streams for the experiment command.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kEmStream = 2;
constexpr std::uint64_t kBootstrapStream = 3;

BoxPolicy ParseBox(const std::string& s) {
  return s == "tight" ? BoxPolicy::kTight : BoxPolicy::kStandard;
}

std::string BoxName(BoxPolicy p) {
  return p == BoxPolicy::kTight ? "tight" : "standard";
}

std::string ModeName(MarginalMode m) {
  return m == MarginalMode::kConsistent ? "consistent" : "inconsistent";
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    ThrowError(ErrorCode::kIoError, "cannot create directory '" + dir.string() + "'");
  }
}

void WriteFile(const fs::path& path, const std::string& text, RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowError(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) ThrowError(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
  manifest.AddOutput(path);
}

void WriteJson(const fs::path& path, const json& j, RunManifest& manifest) {
  WriteFile(path, j.dump(2) + "\n", manifest);
}

void RequireFile(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    ThrowError(ErrorCode::kIoError, "no such file '" + path.string() + "'");
  }
}

std::string TableCsv(const ProbabilityTable& table) {
  std::ostringstream os;
  for (const Variable& v : table.variables()) os << v.name << ',';
  os << "prob\n";
  for (const auto& [cell, p] : table.cells()) {
    for (std::size_t i = 0; i < cell.size(); ++i) {
      os << table.variables()[i].domain[static_cast<std::size_t>(cell[i])] << ',';
    }
    os << FormatDouble(p) << '\n';
  }
  return os.str();
}

json EmJson(const EMConfig& em) {
  return {{"K", em.K},
          {"max_iters", em.max_iters},
          {"tol", em.elbo_tol},
          {"restarts", em.n_restarts},
          {"seed", em.seed.value},
          {"smoothing", em.smoothing}};
}

void AddEmOptions(CLI::App* app, EMConfig& em, bool with_seed) {
  app->add_option("--K", em.K, "Number of latent classes")->capture_default_str();
  app->add_option("--max-iters", em.max_iters, "EM iteration limit")
      ->capture_default_str();
  app->add_option("--tol", em.elbo_tol, "Stop when the objective gains less")
      ->capture_default_str();
  app->add_option("--restarts", em.n_restarts, "Random restarts")
      ->capture_default_str();
  app->add_option("--smoothing", em.smoothing, "Pseudo-count per parameter")
      ->capture_default_str();
  if (with_seed) {
    app->add_option("--seed", em.seed.value, "Seed for the initialisations")
        ->capture_default_str();
  }
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string internal;
  std::string external;
  std::string classifier;
  std::string mode = "auto";
  int resolution = 100;
  double di_cap = 5.0;
  std::string box = "standard";
  std::string out = "bounds_out";
};

void RunBounds(const BoundsArgs& a, RunManifest& manifest, std::ostream& err) {
  for (const std::string& f : {a.internal, a.external, a.classifier}) RequireFile(f);
  const MarginalFile in = ReadMarginalCsv(fs::path(a.internal), MarginalRole::kInternal);
  const MarginalFile ex = ReadMarginalCsv(fs::path(a.external), MarginalRole::kExternal);
  const std::array<double, 4> clf = ReadClassifierCsv(fs::path(a.classifier));
  manifest.AddInput(a.internal);
  manifest.AddInput(a.external);
  manifest.AddInput(a.classifier);

  FeasibleSpec spec;
  spec.internal = in.marginal;
  spec.external = ex.marginal;
  spec.grid_resolution = a.resolution;
  spec.box_policy = ParseBox(a.box);
  spec.mode = a.mode == "auto"         ? DetectMode(in.marginal, ex.marginal)
              : a.mode == "consistent" ? MarginalMode::kConsistent
                                       : MarginalMode::kInconsistent;
  manifest.SetConfig({{"internal", a.internal},
                      {"external", a.external},
                      {"classifier", a.classifier},
                      {"mode", a.mode},
                      {"resolved_mode", ModeName(spec.mode)},
                      {"resolution", a.resolution},
                      {"di_cap", a.di_cap},
                      {"box", a.box}});

  const FeasibleSet set = Enumerate(spec);
  SummaryOptions opts;
  opts.di_cap = a.di_cap;
  const FairnessSummary dd =
      Summarize(clf, set, Metric::kDemographicDisparity, std::nullopt, opts);
  const FairnessSummary di =
      Summarize(clf, set, Metric::kDisparateImpact, std::nullopt, opts);

  json warnings = json::array();
  for (const auto* w : {&in.warnings, &ex.warnings}) {
    for (const std::string& s : *w) {
      warnings.push_back(s);
      err << "warning: " << s << '\n';
    }
  }
  const json summary = {
      {"mode", ModeName(spec.mode)},
      {"n_feasible", set.size()},
      {"n_grid_points", set.n_grid_points},
      {"box", {{"c_lo", set.box.c_lo}, {"c_hi", set.box.c_hi},
               {"k_lo", set.box.k_lo}, {"k_hi", set.box.k_hi}}},
      {"variables", {in.var_a, in.var_b, ex.var_b}},
      {"DI", ToJson(di)},
      {"DD", ToJson(dd)},
      {"warnings", warnings}};

  std::ostringstream csv;
  csv << "c,k,DI,DD\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const GroupOutcome g = Propagate(clf, set.joints[i]);
    csv << FormatDouble(set.params[i].first) << ',' << FormatDouble(set.params[i].second)
        << ',' << FormatDouble(DisparateImpact(g)) << ','
        << FormatDouble(DemographicDisparity(g)) << '\n';
  }
  const fs::path dir(a.out);
  EnsureDir(dir);
  WriteJson(dir / "summary.json", summary, manifest);
  WriteFile(dir / "feasible.csv", csv.str(), manifest);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  bool desk = false;
  bool full_scale = false;
  unsigned long long seed = 0;
  std::optional<int> ground_truths;
  int resolution = 100;
  double di_cap = 5.0;
  double classifier_concentration = 1.0;
  double joint_concentration = 1.0;
  double min_marginal_mass = 1e-3;
  std::string box = "standard";
  std::string out_dir = "simulate_out";
};

void RunSimulate(const SimulateArgs& a, RunManifest& manifest) {
  ScenarioConfig cfg = a.full_scale ? ScenarioConfig::FullScale() : ScenarioConfig::Desk();
  if (a.ground_truths) cfg.n_ground_truths = *a.ground_truths;
  cfg.grid_resolution = a.resolution;
  cfg.di_cap = a.di_cap;
  cfg.classifier_concentration = a.classifier_concentration;
  cfg.joint_concentration = a.joint_concentration;
  cfg.min_marginal_mass = a.min_marginal_mass;
  cfg.box_policy = ParseBox(a.box);
  cfg.seed = RngSeed{a.seed};
  cfg.Validate();

  json variants = json::array();
  for (const Distortion& d : cfg.variants) variants.push_back({d.alpha, d.beta});
  manifest.SetSeed(a.seed);
  manifest.SetConfig({{"scale", a.full_scale ? "full" : "desk"},
                      {"ground_truths", cfg.n_ground_truths},
                      {"variants", variants},
                      {"resolution", cfg.grid_resolution},
                      {"di_cap", cfg.di_cap},
                      {"classifier_concentration", cfg.classifier_concentration},
                      {"joint_concentration", cfg.joint_concentration},
                      {"min_marginal_mass", cfg.min_marginal_mass},
                      {"box", BoxName(cfg.box_policy)},
                      {"threads", ThreadsFromEnv()}});

  const StudyResult study = RunStudy(cfg, ThreadsFromEnv());
  std::ostringstream csv;
  WriteScenarioCsv(study.scenarios, csv);
  const fs::path dir(a.out_dir);
  EnsureDir(dir);
  WriteFile(dir / "scenarios.csv", csv.str(), manifest);
  WriteJson(dir / "aggregate.json", ToJson(study.report), manifest);
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string d1;
  std::string d2;
  std::string partition;
  std::string method = "latent";
  EMConfig em;
  std::string out = "estimate_out";
};

std::vector<std::string> Concat(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void RunEstimate(const EstimateArgs& a, RunManifest& manifest) {
  for (const std::string& f : {a.d1, a.d2, a.partition}) RequireFile(f);
  const CategoricalDataset d1 = ReadCategoricalCsv(a.d1);
  const CategoricalDataset d2 = ReadCategoricalCsv(a.d2);
  const VariablePartition part = PartitionFromJson(ReadJsonFile(a.partition));
  part.Validate();
  a.em.Validate();
  manifest.AddInput(a.d1);
  manifest.AddInput(a.d2);
  manifest.AddInput(a.partition);
  json config = {{"d1", a.d1}, {"d2", a.d2}, {"partition", a.partition},
                 {"method", a.method}};
  if (a.method == "latent") {
    config["em"] = EmJson(a.em);
    manifest.SetSeed(a.em.seed.value);
  }
  manifest.SetConfig(config);

  const auto internal_vars = Concat(part.internal, part.common);
  const auto external_vars = Concat(part.external, part.common);
  const auto all_vars = Concat(Concat(part.internal, part.external), part.common);
  const fs::path dir(a.out);
  json report = {{"method", a.method},
                 {"d1_rows", d1.num_rows()},
                 {"d2_rows", d2.num_rows()},
                 {"variables", all_vars}};

  if (a.method == "latent") {
    const EMFit fit = FitLatentNB(d1, d2, part, a.em);
    const ProbabilityTable joint = ModelJoint(fit.model, all_vars);
    std::ostringstream trace;
    trace << "restart,iteration,elbo\n";
    for (std::size_t r = 0; r < fit.traces.size(); ++r) {
      for (std::size_t i = 0; i < fit.traces[r].size(); ++i) {
        trace << r << ',' << i << ',' << FormatDouble(fit.traces[r][i]) << '\n';
      }
    }
    report["best_restart"] = fit.best_restart;
    report["final_elbo"] = fit.final_elbo;
    report["iterations"] = fit.traces[static_cast<std::size_t>(fit.best_restart)].size();
    EnsureDir(dir);
    WriteJson(dir / "model.json", ToJson(fit.model), manifest);
    WriteFile(dir / "elbo_trace.csv", trace.str(), manifest);
    WriteFile(dir / "joint.csv", TableCsv(joint), manifest);
    WriteFile(dir / "implied_internal.csv", TableCsv(joint.Marginalize(internal_vars)),
              manifest);
    WriteFile(dir / "implied_external.csv", TableCsv(joint.Marginalize(external_vars)),
              manifest);
  } else {
    std::vector<std::string> warnings;
    const ProbabilityTable ext = EmpiricalMarginal(d2, external_vars);
    const ConditionalTable cond = EmpiricalConditional(d1, part.internal, part.common);
    const ProbabilityTable joint = MarginalPreserve(ext, cond, &warnings);
    report["warnings"] = warnings;
    EnsureDir(dir);
    WriteFile(dir / "joint.csv", TableCsv(joint), manifest);
    WriteFile(dir / "implied_internal.csv", TableCsv(joint.Marginalize(internal_vars)),
              manifest);
    WriteFile(dir / "implied_external.csv", TableCsv(joint.Marginalize(external_vars)),
              manifest);
  }
  WriteJson(dir / "estimate.json", report, manifest);
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::string recipe;
  std::string split;
  std::string method = "feasible";
  int bootstrap = 1000;
  unsigned long long seed = 0;
  int resolution = 100;
  double di_cap = 5.0;
  std::string box = "standard";
  EMConfig em;
  std::string out_dir = "experiment_out";
};

json Finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json Point(const PointEstimate& p) { return {{"DI", Finite(p.di)}, {"DD", Finite(p.dd)}}; }

void RunExperiment(const ExperimentArgs& a, RunManifest& manifest) {
  RequireFile(a.recipe);
  RequireFile(a.split);
  const DatasetRecipe recipe = LoadRecipe(a.recipe);
  SplitSpec spec = LoadSplitSpec(a.split);
  manifest.AddInput(a.recipe);
  for (const fs::path& s : recipe.sources) manifest.AddInput(s);
  manifest.AddInput(a.split);
  const IngestResult ingest = Ingest(recipe);
  spec.Resolve(recipe, ingest.data);
  spec.Validate(ingest.data);

  EMConfig em = a.em;
  em.seed = DeriveSeed(RngSeed{a.seed}, kEmStream);
  em.Validate();
  manifest.SetSeed(a.seed);
  json config = {{"recipe", a.recipe},
                 {"split", a.split},
                 {"method", a.method},
                 {"dataset", recipe.name},
                 {"label", spec.label},
                 {"favourable", spec.favourable},
                 {"protected", spec.protected_attribute},
                 {"overlap", spec.overlap},
                 {"internal", spec.internal},
                 {"external", spec.external},
                 {"em", EmJson(em)}};

  const fs::path dir(a.out_dir);
  std::ostringstream hist;
  hist << "value,metric\n";
  json result = {{"dataset", recipe.name},
                 {"method", a.method},
                 {"ingest", ToJson(ingest.report)}};

  if (a.method == "feasible") {
    FeasibleExperimentOptions opts;
    opts.grid_resolution = a.resolution;
    opts.box_policy = ParseBox(a.box);
    opts.di_cap = a.di_cap;
    opts.em = em;
    config["resolution"] = a.resolution;
    config["di_cap"] = a.di_cap;
    config["box"] = BoxName(opts.box_policy);
    manifest.SetConfig(config);
    const FeasibleExperimentResult r = RunFeasibleExperiment(ingest.data, spec, opts);
    const auto arr = [](auto&& values) {
      json out = json::array();
      for (double v : values) out.push_back(v);
      return out;
    };
    result["mode"] = ModeName(r.mode);
    result["n_feasible"] = r.set.size();
    result["binary"] = {(*spec.binary)[0].name, (*spec.binary)[1].name,
                        (*spec.binary)[2].name};
    result["internal_marginal"] = arr(r.internal.values());
    result["external_marginal"] = arr(r.external.values());
    result["classifier"] = arr(r.classifier);
    result["truth"] = arr(r.truth.values());
    result["DI"] = ToJson(r.di);
    result["DD"] = ToJson(r.dd);
    result["latent"] = Point(r.latent);
    result["marginal"] = Point(r.marginal);
    result["di_below_eeoc"] = r.di_below_eeoc;
    for (double v : r.dd.values) hist << FormatDouble(v) << ",DD\n";
    for (double v : r.di.values) hist << FormatDouble(v) << ",DI\n";
    EnsureDir(dir);
    WriteJson(dir / "summary.json", result, manifest);
  } else {
    const StructuralMethod method =
        a.method == "latent" ? StructuralMethod::kLatent : StructuralMethod::kMarginal;
    config["bootstrap"] = a.bootstrap;
    manifest.SetConfig(config);
    const DataSplits splits = Split(ingest.data, spec, DeriveSeed(RngSeed{a.seed}, kSplitStream));
    std::vector<std::string> features;
    for (const std::string& c : spec.internal) {
      if (c != spec.label) features.push_back(c);
    }
    const ClassifierTable clf = TrainEmpiricalClassifier(
        splits.train, features, spec.label, spec.favourable, spec.hard_classifier);
    const StructuralEvaluation ev = EvaluateStructural(
        splits, spec, clf, method, em, a.bootstrap, DeriveSeed(RngSeed{a.seed}, kBootstrapStream));
    result["rows"] = {{"test", splits.test.num_rows()},
                      {"train", splits.train.num_rows()},
                      {"internal", splits.internal.num_rows()},
                      {"external", splits.external.num_rows()}};
    result["DI"] = ToJson(ev.di);
    result["DD"] = ToJson(ev.dd);
    result["warnings"] = ev.warnings;
    for (double v : ev.dd.samples) hist << FormatDouble(v) << ",DD\n";
    for (double v : ev.di.samples) hist << FormatDouble(v) << ",DI\n";
    EnsureDir(dir);
    WriteJson(dir / "report.json", result, manifest);
  }
  WriteFile(dir / "histogram.csv", hist.str(), manifest);
}

// ---- replay ---------------------------------------------------------------

std::vector<std::string> ReplayArgs(const std::string& manifest_path,
                                    const std::string& out_override) {
  RequireFile(manifest_path);
  const json m = ReadJsonFile(manifest_path);
  if (!m.contains("command") || !m.contains("args") || !m["args"].is_array()) {
    ThrowError(ErrorCode::kSchemaMismatch, manifest_path + ": not a run manifest");
  }
  std::vector<std::string> args = m["args"].get<std::vector<std::string>>();
  if (out_override.empty()) return args;
  bool replaced = false;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--out" || args[i] == "--out-dir") {
      args[i + 1] = out_override;
      replaced = true;
    }
  }
  for (std::string& s : args) {
    for (const char* flag : {"--out=", "--out-dir="}) {
      if (s.rfind(flag, 0) == 0) {
        s = std::string(flag) + out_override;
        replaced = true;
      }
    }
  }
  if (!replaced) {
    args.push_back(args.front() == "simulate" || args.front() == "experiment" ? "--out-dir"
                                                                             : "--out");
    args.push_back(out_override);
  }
  return args;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSupportMismatch:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kUnknownVariable:
    case ErrorCode::kDomainMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kUnknownCategory:
    case ErrorCode::kInsufficientRows:
    case ErrorCode::kIoError:
      return kExitInput;
    case ErrorCode::kZeroConditioningMass:
    case ErrorCode::kEmptyFeasibleSet:
    case ErrorCode::kOutOfBox:
    case ErrorCode::kInfeasiblePoint:
    case ErrorCode::kZeroGroupMass:
    case ErrorCode::kAllValuesFiltered:
    case ErrorCode::kNonFiniteLikelihood:
    case ErrorCode::kDegenerateResult:
    case ErrorCode::kUndefinedMetric:
    case ErrorCode::kOverflow:
      return kExitInfeasible;
  }
  return kExitInternal;
}

unsigned ThreadsFromEnv() {
  const char* v = std::getenv("FAIRBOUND_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0' || n == 0 || n > 1024) return 1;
  return static_cast<unsigned>(n);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fairness bounds and estimates from marginal data", "fairbound"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  BoundsArgs ba;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "Feasible-set bounds on DI and DD from two marginal files");
  bounds->add_option("--internal", ba.internal, "CSV `s,o,prob`")->required();
  bounds->add_option("--external", ba.external, "CSV `o,e,prob`")->required();
  bounds->add_option("--classifier", ba.classifier, "CSV `s,o,p_yes`")->required();
  bounds->add_option("--mode", ba.mode, "Marginal mode")
      ->check(CLI::IsMember({"auto", "consistent", "inconsistent"}))
      ->capture_default_str();
  bounds->add_option("--resolution", ba.resolution, "Grid points per free parameter")
      ->capture_default_str();
  bounds->add_option("--di-cap", ba.di_cap, "Drop DI values above this")
      ->capture_default_str();
  bounds->add_option("--box", ba.box, "Free-parameter box")
      ->check(CLI::IsMember({"standard", "tight"}))
      ->capture_default_str();
  bounds->add_option("--out", ba.out, "Output directory")->capture_default_str();

  SimulateArgs sa;
  CLI::App* simulate = app.add_subcommand("simulate", "Synthetic coverage study");
  CLI::Option* desk = simulate->add_flag("--desk", sa.desk, "200 ground truths (default)");
  simulate->add_flag("--full", sa.full_scale, "1000 ground truths")->excludes(desk);
  simulate->add_option("--seed", sa.seed, "Base seed")->capture_default_str();
  simulate->add_option("--ground-truths", sa.ground_truths, "Override the number of truths");
  simulate->add_option("--resolution", sa.resolution, "Grid points per free parameter")
      ->capture_default_str();
  simulate->add_option("--di-cap", sa.di_cap, "DI cap")->capture_default_str();
  simulate->add_option("--classifier-concentration", sa.classifier_concentration,
                       "Beta concentration of classifier rates")
      ->capture_default_str();
  simulate->add_option("--joint-concentration", sa.joint_concentration,
                       "Dirichlet concentration of ground truths")
      ->capture_default_str();
  simulate->add_option("--min-marginal-mass", sa.min_marginal_mass,
                       "Redraw truths with a marginal cell below this")
      ->capture_default_str();
  simulate->add_option("--box", sa.box, "Free-parameter box")
      ->check(CLI::IsMember({"standard", "tight"}))
      ->capture_default_str();
  simulate->add_option("--out-dir", sa.out_dir, "Output directory")->capture_default_str();

  EstimateArgs ea;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Single joint estimate from two categorical datasets");
  estimate->add_option("--d1", ea.d1, "Internal + common variables (CSV)")->required();
  estimate->add_option("--d2", ea.d2, "External + common variables (CSV)")->required();
  estimate->add_option("--partition", ea.partition, "JSON {internal, external, common}")
      ->required();
  estimate->add_option("--method", ea.method, "Estimator")
      ->check(CLI::IsMember({"latent", "marginal"}))
      ->capture_default_str();
  AddEmOptions(estimate, ea.em, true);
  estimate->add_option("--out", ea.out, "Output directory")->capture_default_str();

  ExperimentArgs xa;
  CLI::App* experiment = app.add_subcommand("experiment", "Real-data experiment");
  experiment->add_option("--recipe", xa.recipe, "Dataset recipe (JSON)")->required();
  experiment->add_option("--split", xa.split, "Split specification (JSON)")->required();
  experiment->add_option("--method", xa.method, "Experiment")
      ->check(CLI::IsMember({"feasible", "latent", "marginal"}))
      ->capture_default_str();
  experiment->add_option("--bootstrap", xa.bootstrap, "Bootstrap iterations")
      ->capture_default_str();
  experiment->add_option("--seed", xa.seed, "Base seed")->capture_default_str();
  experiment->add_option("--resolution", xa.resolution, "Grid points per free parameter")
      ->capture_default_str();
  experiment->add_option("--di-cap", xa.di_cap, "DI cap")->capture_default_str();
  experiment->add_option("--box", xa.box, "Free-parameter box")
      ->check(CLI::IsMember({"standard", "tight"}))
      ->capture_default_str();
  AddEmOptions(experiment, xa.em, false);
  experiment->add_option("--out-dir", xa.out_dir, "Output directory")->capture_default_str();

  std::string replay_manifest;
  std::string replay_out;
  CLI::App* replay = app.add_subcommand("replay", "Re-run the command in a manifest");
  replay->add_option("manifest", replay_manifest, "manifest.json")->required();
  replay->add_option("--out-dir", replay_out, "Write outputs here instead");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (replay->parsed()) {
      const std::vector<std::string> again = ReplayArgs(replay_manifest, replay_out);
      if (!again.empty() && again.front() == "replay") {
        ThrowError(ErrorCode::kSchemaMismatch, "a manifest cannot replay a replay");
      }
      return RunCli(again, out, err);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    RunManifest manifest(command, args);
    fs::path dir;
    if (bounds->parsed()) {
      RunBounds(ba, manifest, err);
      dir = ba.out;
    } else if (simulate->parsed()) {
      RunSimulate(sa, manifest);
      dir = sa.out_dir;
    } else if (estimate->parsed()) {
      RunEstimate(ea, manifest);
      dir = ea.out;
    } else {
      RunExperiment(xa, manifest);
      dir = xa.out_dir;
    }
    manifest.Finish();
    manifest.Write(dir);
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace fairbound::cli
