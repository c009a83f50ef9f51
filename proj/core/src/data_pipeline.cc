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

#include "fairbound/data_pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "fairbound/csv.h"
#include "fairbound/error.h"

namespace fairbound {
namespace {

using nlohmann::json;

[[noreturn]] void Schema(const std::string& message) {
  ThrowError(ErrorCode::kSchemaMismatch, "split: " + message);
}

bool Contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<std::string> Without(const std::vector<std::string>& v,
                                 const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const std::string& x : v) {
    if (!Contains(drop, x)) out.push_back(x);
  }
  return out;
}

std::vector<std::string> Strings(const json& j, const char* key) {
  if (!j.is_array()) Schema(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const json& v : j) {
    if (!v.is_string()) Schema(std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

BinarySpec ParseBinary(const json& j, const char* role) {
  if (!j.is_object()) Schema(std::string("binary '") + role + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "name" && key != "column" && key != "one_values" && key != "at_least") {
      Schema("unknown key '" + key + "' in binary '" + role + "'");
    }
  }
  BinarySpec b;
  b.column = j.at("column").get<std::string>();
  b.name = j.contains("name") ? j["name"].get<std::string>() : b.column;
  if (j.contains("one_values")) b.one_values = Strings(j["one_values"], "one_values");
  if (j.contains("at_least")) b.at_least = j["at_least"].get<double>();
  if (b.one_values.empty() == !b.at_least.has_value()) {
    Schema(std::string("binary '") + role + "' needs one of 'one_values' or 'at_least'");
  }
  return b;
}

std::size_t Round(double x) { return static_cast<std::size_t>(std::llround(x)); }

// Cumulative sampler over the cells of a table, built once and shared by all
// bootstrap draws.
class TableSampler {
 public:
  explicit TableSampler(const ProbabilityTable& table) : vars_(table.variables()) {
    std::vector<double> weights;
    for (const auto& [cell, p] : table.cells()) {
      cells_.push_back(cell);
      weights.push_back(p);
    }
    if (cells_.empty()) {
      ThrowError(ErrorCode::kInvalidArgument, "cannot sample from an empty table");
    }
    sampler_.emplace(weights);
  }

  CategoricalDataset Draw(std::size_t n, RngSeed seed) const {
    Rng rng(seed);
    CategoricalDataset out(vars_);
    out.Reserve(n);
    for (std::size_t r = 0; r < n; ++r) out.AddRow(cells_[sampler_->Sample(rng)]);
    return out;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Cell> cells_;
  std::optional<CategoricalSampler> sampler_;
};

double Mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) /
                               static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

PointEstimate MetricsOf(const std::array<double, 4>& classifier,
                        const BinaryJoint3& joint) {
  const GroupOutcome g = Propagate(classifier, joint);
  return {DisparateImpact(g), DemographicDisparity(g)};
}

}  // namespace

int BinarySpec::Apply(const std::string& label) const {
  if (Contains(one_values, label)) return 1;
  if (at_least) {
    double x = 0.0;
    if (!ParseDouble(label, x)) {
      ThrowError(ErrorCode::kParseError, "binary '" + name + "': category '" +
                                             label + "' is not a number");
    }
    return x >= *at_least ? 1 : 0;
  }
  return 0;
}

void SplitSpec::Resolve(const DatasetRecipe& recipe, const CategoricalDataset& data) {
  if (label.empty()) label = recipe.label;
  if (favourable.empty()) favourable = recipe.favourable;
  if (protected_attribute.empty()) protected_attribute = recipe.protected_attribute;
  if (internal.empty()) {
    for (const Variable& v : data.variables()) {
      if (v.name != label && !Contains(external, v.name)) internal.push_back(v.name);
    }
    for (const std::string& o : overlap) {
      if (!Contains(internal, o)) internal.push_back(o);
    }
  }
}

void SplitSpec::Validate(const CategoricalDataset& data) const {
  const auto exists = [&](const std::string& name) {
    if (!data.HasVariable(name)) Schema("column '" + name + "' is not in the dataset");
  };
  if (overlap.empty()) Schema("'overlap' must name at least one column");
  if (label.empty() || protected_attribute.empty() || favourable.empty()) {
    Schema("label, favourable value and protected attribute are required");
  }
  exists(label);
  exists(protected_attribute);
  for (const auto* list : {&overlap, &external, &internal}) {
    for (const std::string& c : *list) exists(c);
  }
  for (const std::string& o : overlap) {
    if (!Contains(external, o) || !Contains(internal, o)) {
      Schema("overlap column '" + o + "' must be on both sides");
    }
  }
  if (!Contains(external, protected_attribute)) {
    Schema("the protected attribute must be an external column");
  }
  for (const std::string& c : internal) {
    if (Contains(external, c) && !Contains(overlap, c)) {
      Schema("'" + c + "' is on both sides but not an overlap column");
    }
  }
  if (Contains(internal, label) || Contains(external, label)) {
    Schema("the label may not be a marginal column");
  }
  const Variable& lv = data.variables()[data.IndexOf(label)];
  if (std::find(lv.domain.begin(), lv.domain.end(), favourable) == lv.domain.end()) {
    Schema("favourable value '" + favourable + "' is not a label category");
  }
  for (double f : {holdout_fraction, train_fraction, internal_fraction}) {
    if (!(f > 0.0 && f < 1.0)) {
      ThrowError(ErrorCode::kInvalidArgument, "split fractions must lie in (0, 1)");
    }
  }
  if (binary) {
    const auto& [s, o, e] = *binary;
    for (const BinarySpec* b : {&s, &o, &e}) exists(b->column);
    if (!Contains(internal, s.column) || Contains(overlap, s.column)) {
      Schema("binary 's' must be an internal, non-overlap column");
    }
    if (!Contains(overlap, o.column)) Schema("binary 'o' must be an overlap column");
    if (e.column != protected_attribute) {
      Schema("binary 'e' must be the protected attribute");
    }
    std::set<std::string> names = {s.name, o.name, e.name, label};
    if (names.size() != 4) Schema("binary variable names must be distinct");
  }
}

SplitSpec ParseSplitSpec(const json& j) {
  if (!j.is_object()) Schema("top level must be an object");
  static const std::set<std::string> kKeys = {
      "format_version",  "name",           "description",     "label",
      "favourable",      "protected",      "overlap",         "external",
      "internal",        "holdout_fraction", "train_fraction", "internal_fraction",
      "shared_marginal_rows", "classifier_output", "binary"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) Schema("unknown key '" + key + "'");
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kSplitFormatVersion) {
    Schema("'format_version' must be " + std::to_string(kSplitFormatVersion));
  }
  try {
    SplitSpec s;
    s.name = j.value("name", "");
    s.label = j.value("label", "");
    s.favourable = j.value("favourable", "");
    s.protected_attribute = j.value("protected", "");
    s.overlap = Strings(j.at("overlap"), "overlap");
    s.external = Strings(j.at("external"), "external");
    if (j.contains("internal")) s.internal = Strings(j["internal"], "internal");
    s.holdout_fraction = j.value("holdout_fraction", s.holdout_fraction);
    s.train_fraction = j.value("train_fraction", s.train_fraction);
    s.internal_fraction = j.value("internal_fraction", s.internal_fraction);
    s.shared_marginal_rows = j.value("shared_marginal_rows", false);
    const std::string output = j.value("classifier_output", "probability");
    if (output != "probability" && output != "hard") {
      Schema("'classifier_output' must be 'probability' or 'hard'");
    }
    s.hard_classifier = output == "hard";
    if (j.contains("binary")) {
      const json& b = j["binary"];
      if (!b.is_object() || b.size() != 3) Schema("'binary' needs exactly s, o and e");
      s.binary = std::array<BinarySpec, 3>{ParseBinary(b.at("s"), "s"),
                                           ParseBinary(b.at("o"), "o"),
                                           ParseBinary(b.at("e"), "e")};
    }
    return s;
  } catch (const json::exception& e) {
    Schema(e.what());
  }
}

SplitSpec LoadSplitSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    ThrowError(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return ParseSplitSpec(j);
}

DataSplits Split(const CategoricalDataset& data, const SplitSpec& spec,
                 RngSeed seed) {
  spec.Validate(data);
  const std::size_t n = data.num_rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
  const std::size_t n_test = Round(spec.holdout_fraction * static_cast<double>(n));
  const std::size_t rest = n - n_test;
  const std::size_t n_train = Round(spec.train_fraction * static_cast<double>(rest));
  const std::size_t pool = rest - n_train;
  const std::size_t n_internal =
      spec.shared_marginal_rows
          ? pool
          : Round(spec.internal_fraction * static_cast<double>(pool));
  const std::size_t n_external = spec.shared_marginal_rows ? pool : pool - n_internal;
  if (n_test == 0 || n_train == 0 || n_internal == 0 || n_external == 0) {
    ThrowError(ErrorCode::kInsufficientRows,
               std::to_string(n) + " rows cannot fill every split");
  }

  DataSplits out;
  auto block = [&](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(begin + count));
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  out.test_rows = block(0, n_test);
  out.train_rows = block(n_test, n_train);
  out.internal_rows = block(n_test + n_train, n_internal);
  out.external_rows = spec.shared_marginal_rows
                          ? out.internal_rows
                          : block(n_test + n_train + n_internal, n_external);
  out.test = data.SelectRows(out.test_rows);
  out.train = data.SelectRows(out.train_rows);
  out.internal = data.SelectRows(out.internal_rows).Project(spec.internal);
  out.external = data.SelectRows(out.external_rows).Project(spec.external);
  return out;
}

ClassifierTable TrainEmpiricalClassifier(const CategoricalDataset& train,
                                         std::span<const std::string> features,
                                         std::string_view label,
                                         std::string_view favourable, bool hard) {
  if (train.num_rows() == 0) {
    ThrowError(ErrorCode::kEmptyDataset, "classifier training data is empty");
  }
  const std::size_t label_col = train.IndexOf(label);
  const auto& domain = train.variables()[label_col].domain;
  const auto fav = std::find(domain.begin(), domain.end(), favourable);
  if (fav == domain.end()) {
    ThrowError(ErrorCode::kInvalidArgument,
               "'" + std::string(favourable) + "' is not a label category");
  }
  const int fav_code = static_cast<int>(fav - domain.begin());
  std::vector<std::size_t> cols;
  std::vector<Variable> vars;
  for (const std::string& f : features) {
    cols.push_back(train.IndexOf(f));
    vars.push_back(train.variables()[cols.back()]);
  }
  std::map<Cell, std::pair<std::size_t, std::size_t>> counts;  // (yes, total)
  std::size_t yes_total = 0;
  Cell cell(cols.size());
  for (std::size_t r = 0; r < train.num_rows(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) cell[i] = train.at(r, cols[i]);
    auto& c = counts[cell];
    const bool yes = train.at(r, label_col) == fav_code;
    c.first += yes;
    ++c.second;
    yes_total += yes;
  }
  const auto decide = [&](double rate) {
    return hard ? (rate >= 0.5 ? 1.0 : 0.0) : rate;
  };
  std::map<Cell, double> table;
  for (const auto& [c, yn] : counts) {
    table[c] = decide(static_cast<double>(yn.first) / static_cast<double>(yn.second));
  }
  const double base =
      decide(static_cast<double>(yes_total) / static_cast<double>(train.num_rows()));
  return ClassifierTable(std::move(vars), std::move(table), base);
}

std::string_view MethodName(StructuralMethod method) {
  return method == StructuralMethod::kLatent ? "latent" : "marginal";
}

BootstrapResult Bootstrap(const RowSampler& sampler, std::size_t n, int B,
                          RngSeed seed, const ClassifierTable& classifier,
                          std::string_view protected_var) {
  if (B < 1 || n == 0) {
    ThrowError(ErrorCode::kInvalidArgument, "bootstrap needs B >= 1 and n >= 1");
  }
  BootstrapResult out;
  for (int b = 0; b < B; ++b) {
    const CategoricalDataset sample =
        sampler(n, DeriveSeed(seed, static_cast<std::uint64_t>(b)));
    GroupOutcome g;
    try {
      g = Propagate(classifier, sample, protected_var);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroGroupMass) throw;
      ++out.n_undefined;
      continue;
    }
    out.dd.push_back(DemographicDisparity(g));
    const double di = DisparateImpact(g);
    if (std::isfinite(di)) {
      out.di.push_back(di);
    } else {
      ++out.n_undefined;
    }
  }
  return out;
}

EvalReport MakeEvalReport(std::string method, Metric metric, double true_value,
                          std::vector<double> samples, int B,
                          std::size_t n_undefined) {
  if (samples.empty()) {
    ThrowError(ErrorCode::kUndefinedMetric,
               "no bootstrap draw produced a defined " +
                   std::string(MetricName(metric)));
  }
  EvalReport r;
  r.method = std::move(method);
  r.metric = metric;
  r.true_value = true_value;
  r.bootstrap_mean = Mean(samples);
  r.bootstrap_std = SampleStd(samples);
  r.abs_diff = std::abs(true_value - r.bootstrap_mean);
  r.B = B;
  r.n_undefined = n_undefined;
  r.samples = std::move(samples);
  return r;
}

StructuralEvaluation EvaluateStructural(const DataSplits& splits,
                                        const SplitSpec& spec,
                                        const ClassifierTable& classifier,
                                        StructuralMethod method,
                                        const EMConfig& em, int B, RngSeed seed) {
  GroupOutcome truth;
  try {
    truth = Propagate(classifier, splits.test, spec.protected_attribute);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroGroupMass) throw;
    ThrowError(ErrorCode::kUndefinedMetric,
               "a protected group is empty in the test set");
  }

  StructuralEvaluation eval;
  VariablePartition partition;
  partition.internal = Without(spec.internal, spec.overlap);
  partition.external = Without(spec.external, spec.overlap);
  partition.common = spec.overlap;

  RowSampler sampler;
  if (method == StructuralMethod::kLatent) {
    auto model = std::make_shared<LatentNBModel>(
        FitLatentNB(splits.internal, splits.external, partition, em).model);
    sampler = [model](std::size_t n, RngSeed s) { return SampleModel(*model, n, s); };
  } else {
    const ProbabilityTable external = EmpiricalMarginal(splits.external, spec.external);
    const ConditionalTable conditional =
        EmpiricalConditional(splits.internal, partition.internal, partition.common);
    auto table = std::make_shared<TableSampler>(
        MarginalPreserve(external, conditional, &eval.warnings));
    sampler = [table](std::size_t n, RngSeed s) { return table->Draw(n, s); };
  }

  BootstrapResult boot = Bootstrap(sampler, splits.test.num_rows(), B, seed,
                                   classifier, spec.protected_attribute);
  const std::string name(MethodName(method));
  eval.di = MakeEvalReport(name, Metric::kDisparateImpact, DisparateImpact(truth),
                           std::move(boot.di), B, boot.n_undefined);
  eval.dd = MakeEvalReport(name, Metric::kDemographicDisparity,
                           DemographicDisparity(truth), std::move(boot.dd), B,
                           boot.n_undefined);
  return eval;
}

CategoricalDataset Binarize(const CategoricalDataset& data, const SplitSpec& spec) {
  if (!spec.binary) {
    ThrowError(ErrorCode::kInvalidArgument, "split has no binary reduction");
  }
  const std::vector<std::string> bits = {"0", "1"};
  const auto& specs = *spec.binary;
  std::vector<Variable> vars;
  std::vector<std::size_t> cols;
  // Precompute the 0/1 code of every category of each source column.
  std::vector<std::vector<int>> codes;
  for (const BinarySpec& b : specs) {
    vars.push_back({b.name, bits});
    cols.push_back(data.IndexOf(b.column));
    std::vector<int> code;
    for (const std::string& label : data.variables()[cols.back()].domain) {
      code.push_back(b.Apply(label));
    }
    codes.push_back(code);
  }
  vars.push_back({spec.label, bits});
  cols.push_back(data.IndexOf(spec.label));
  {
    std::vector<int> code;
    for (const std::string& label : data.variables()[cols.back()].domain) {
      code.push_back(label == spec.favourable ? 1 : 0);
    }
    codes.push_back(code);
  }
  CategoricalDataset out(vars);
  out.Reserve(data.num_rows());
  std::vector<int> row(vars.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      row[i] = codes[i][static_cast<std::size_t>(data.at(r, cols[i]))];
    }
    out.AddRow(row);
  }
  return out;
}

BinaryJoint3 ToBinaryJoint3(const ProbabilityTable& table,
                            std::span<const std::string> names) {
  if (names.size() != 3) {
    ThrowError(ErrorCode::kInvalidArgument, "expected three variable names");
  }
  std::array<std::size_t, 3> idx{};
  for (std::size_t i = 0; i < 3; ++i) {
    idx[i] = table.IndexOf(names[i]);
    if (table.variables()[idx[i]].arity() != 2) {
      ThrowError(ErrorCode::kInvalidArgument, "'" + names[i] + "' is not binary");
    }
  }
  std::array<double, BinaryJoint3::kSize> p{};
  for (const auto& [cell, q] : table.cells()) {
    p[BinaryJoint3::Index(cell[idx[0]], cell[idx[1]], cell[idx[2]])] += q;
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument, "table has no mass");
  }
  for (double& x : p) x /= total;
  return BinaryJoint3::FromProbabilities(p);
}

FeasibleExperimentResult RunFeasibleExperiment(
    const CategoricalDataset& data, const SplitSpec& spec,
    const FeasibleExperimentOptions& options) {
  spec.Validate(data);
  const CategoricalDataset b = Binarize(data, spec);
  const auto& bs = *spec.binary;
  const std::string s = bs[0].name, o = bs[1].name, e = bs[2].name;
  const std::vector<std::string> so = {s, o}, oe = {o, e}, soe = {s, o, e};
  const std::vector<std::string> s_only = {s}, o_only = {o};

  const auto to_marginal = [](const ProbabilityTable& t, MarginalRole role) {
    std::array<double, 4> p{};
    for (const auto& [cell, q] : t.cells()) p[Marginal2::Index(cell[0], cell[1])] += q;
    return Marginal2::FromProbabilities(p, role);
  };

  FeasibleExperimentResult r;
  r.internal = to_marginal(EmpiricalMarginal(b, so), MarginalRole::kInternal);
  r.external = to_marginal(EmpiricalMarginal(b, oe), MarginalRole::kExternal);
  r.mode = DetectMode(r.internal, r.external);
  r.truth = ToBinaryJoint3(EmpiricalMarginal(b, soe), soe);
  r.classifier = TrainEmpiricalClassifier(b, so, spec.label, "1", spec.hard_classifier)
                     .Binary4();

  FeasibleSpec fs;
  fs.internal = r.internal;
  fs.external = r.external;
  fs.mode = r.mode;
  fs.grid_resolution = options.grid_resolution;
  fs.box_policy = options.box_policy;
  r.set = Enumerate(fs);
  SummaryOptions summary_options;
  summary_options.di_cap = options.di_cap;
  r.dd = Summarize(r.classifier, r.set, Metric::kDemographicDisparity, r.truth,
                   summary_options);
  r.di = Summarize(r.classifier, r.set, Metric::kDisparateImpact, r.truth,
                   summary_options);
  r.di_below_eeoc = r.di.max < 0.8;

  VariablePartition partition{s_only, {e}, o_only};
  const EMFit fit = FitLatentNB(b.Project(so), b.Project(oe), partition, options.em);
  r.latent = MetricsOf(r.classifier, ToBinaryJoint3(ModelJoint(fit.model, soe), soe));

  const ProbabilityTable preserved =
      MarginalPreserve(EmpiricalMarginal(b, oe), EmpiricalConditional(b, s_only, o_only));
  r.marginal = MetricsOf(r.classifier, ToBinaryJoint3(preserved, soe));
  return r;
}

}  // namespace fairbound
