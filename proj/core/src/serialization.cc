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

#include "fairbound/serialization.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "fairbound/csv.h"
#include "fairbound/error.h"

namespace fairbound {
namespace {

using nlohmann::json;

json Real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  return in;
}

[[noreturn]] void LineError(const CsvReader& reader, const std::string& message) {
  ThrowError(ErrorCode::kSchemaMismatch, reader.source_name() + ":" +
                                             std::to_string(reader.line_number()) +
                                             ": " + message);
}

int ParseBit(const CsvReader& reader, const std::string& field,
             const std::string& column) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  LineError(reader, "column '" + column + "' must be 0 or 1, got '" + field + "'");
}

double ParseProbability(const CsvReader& reader, const std::string& field,
                        const std::string& column) {
  double v = 0.0;
  if (!ParseDouble(field, v)) {
    LineError(reader, "column '" + column + "': '" + field + "' is not a number");
  }
  if (v < 0.0 || v > 1.0) {
    LineError(reader, "column '" + column + "' must lie in [0, 1], got " + field);
  }
  return v;
}

[[noreturn]] void BadModel(const std::string& message) {
  ThrowError(ErrorCode::kSchemaMismatch, "model: " + message);
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

json ToJson(const FairnessSummary& s) {
  json j;
  j["metric"] = std::string(MetricName(s.metric));
  j["min"] = Real(s.min);
  j["mean"] = Real(s.mean);
  j["max"] = Real(s.max);
  j["range"] = Real(s.range());
  j["n_feasible"] = s.values.size() + s.n_filtered;
  j["n_retained"] = s.values.size();
  j["n_filtered"] = s.n_filtered;
  j["true_value"] = s.true_value ? Real(*s.true_value) : json(nullptr);
  j["contains_truth"] = s.contains_truth ? json(*s.contains_truth) : json(nullptr);
  j["truth_exceeds_cap"] = s.truth_exceeds_cap;
  return j;
}

json ToJson(const EvalReport& r) {
  return {{"method", r.method},
          {"metric", std::string(MetricName(r.metric))},
          {"true_value", Real(r.true_value)},
          {"bootstrap_mean", Real(r.bootstrap_mean)},
          {"bootstrap_std", Real(r.bootstrap_std)},
          {"abs_diff", Real(r.abs_diff)},
          {"B", r.B},
          {"n_undefined", r.n_undefined}};
}

json ToJson(const AggregateReport& r) {
  json bins = json::array();
  for (const BinStats& b : r.bins) {
    bins.push_back({{"label", b.label},
                    {"n_scenarios", b.n_scenarios},
                    {"n_excluded", b.n_excluded},
                    {"avg_diff_DD", Real(b.avg_diff_dd)},
                    {"avg_diff_DI", Real(b.avg_diff_di)},
                    {"avg_range_DD", Real(b.avg_range_dd)},
                    {"avg_range_DI", Real(b.avg_range_di)},
                    {"avg_range_DI_unfiltered", Real(b.avg_range_di_unfiltered)},
                    {"coverage_rate_DD", Real(b.coverage_rate_dd)},
                    {"coverage_rate_DI", Real(b.coverage_rate_di)},
                    {"coverage_rate", Real(b.coverage_rate)}});
  }
  const auto ms = [](const MeanStd& m) {
    return json{{"mean", Real(m.mean)}, {"std", Real(m.std)}};
  };
  return {{"kl_bins", bins},
          {"n_total", r.n_total},
          {"n_scenarios", r.n_scenarios},
          {"n_excluded", r.n_excluded},
          {"excluded_by_reason",
           {{"di_cap", r.n_excluded_di_cap},
            {"empty_feasible_set", r.n_excluded_empty},
            {"zero_group_mass", r.n_excluded_zero_mass},
            {"all_values_filtered", r.n_excluded_all_filtered}}},
          {"diff_DD", ms(r.diff_dd)},
          {"diff_DI", ms(r.diff_di)},
          {"range_DD", ms(r.range_dd)},
          {"range_DI", ms(r.range_di)},
          {"mean_feasible_size", Real(r.mean_feasible_size)},
          {"consistent",
           {{"n_scenarios", r.n_consistent},
            {"coverage_rate_DD", Real(r.consistent_coverage_dd)},
            {"coverage_rate_DI", Real(r.consistent_coverage_di)}}},
          {"ground_truth_rejections", r.ground_truth_rejections}};
}

json ToJson(const IngestReport& r) {
  return {{"rows_read", r.rows_read},
          {"rows_with_nulls", r.rows_with_nulls},
          {"rows_filtered", r.rows_filtered},
          {"rows_rejected", r.rows_rejected},
          {"rows_kept", r.rows_kept}};
}

json ToJson(const LatentNBModel& model) {
  json vars = json::array();
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    json cond = json::array();
    for (std::size_t m = 0; m < model.variables[v].arity(); ++m) {
      json row = json::array();
      for (int k = 0; k < model.K; ++k) row.push_back(model.Cond(v, static_cast<int>(m), k));
      cond.push_back(row);
    }
    vars.push_back({{"name", model.variables[v].name},
                    {"domain", model.variables[v].domain},
                    {"cond", cond}});
  }
  return {{"K", model.K}, {"pi", model.pi}, {"variables", vars}};
}

LatentNBModel LatentNBModelFromJson(const json& j) {
  LatentNBModel model;
  try {
    if (!j.is_object() || !j.at("K").is_number_integer()) BadModel("'K' must be an integer");
    model.K = j["K"].get<int>();
    if (model.K < 1) BadModel("'K' must be positive");
    model.pi = j.at("pi").get<std::vector<double>>();
    for (const json& v : j.at("variables")) {
      Variable var{v.at("name").get<std::string>(),
                   v.at("domain").get<std::vector<std::string>>()};
      const json& cond = v.at("cond");
      if (!cond.is_array() || cond.size() != var.arity()) {
        BadModel("'cond' of '" + var.name + "' needs one row per category");
      }
      std::vector<double> flat;
      for (const json& row : cond) {
        const auto values = row.get<std::vector<double>>();
        if (values.size() != static_cast<std::size_t>(model.K)) {
          BadModel("'cond' rows of '" + var.name + "' need K entries");
        }
        flat.insert(flat.end(), values.begin(), values.end());
      }
      model.variables.push_back(std::move(var));
      model.cond.push_back(std::move(flat));
    }
  } catch (const json::exception& e) {
    BadModel(e.what());
  }
  model.Validate();
  return model;
}

void WriteScenarioCsv(const std::vector<ScenarioResult>& results, std::ostream& out) {
  out << "id,truth_index,variant_index,alpha,beta,kl_common,mode,n_feasible,"
         "excluded,reason,"
         "dd_true,dd_min,dd_mean,dd_max,dd_contains_truth,"
         "di_true,di_min,di_mean,di_max,di_contains_truth,di_n_filtered,"
         "di_min_unfiltered,di_max_unfiltered\n";
  for (const ScenarioResult& r : results) {
    out << r.id << ',' << r.truth_index << ',' << r.variant_index << ','
        << FormatDouble(r.distortion.alpha) << ',' << FormatDouble(r.distortion.beta)
        << ',' << FormatDouble(r.kl_common) << ','
        << (r.mode == MarginalMode::kConsistent ? "consistent" : "inconsistent")
        << ',' << r.n_feasible << ',' << (r.excluded ? 1 : 0) << ','
        << ExclusionReasonName(r.reason) << ',' << FormatDouble(r.dd.true_value)
        << ',' << FormatDouble(r.dd.min) << ',' << FormatDouble(r.dd.mean) << ','
        << FormatDouble(r.dd.max) << ',' << (r.dd.contains_truth ? 1 : 0) << ','
        << FormatDouble(r.di.true_value) << ',' << FormatDouble(r.di.min) << ','
        << FormatDouble(r.di.mean) << ',' << FormatDouble(r.di.max) << ','
        << (r.di.contains_truth ? 1 : 0) << ',' << r.di.n_filtered << ','
        << FormatDouble(r.di_min_unfiltered) << ','
        << FormatDouble(r.di_max_unfiltered) << '\n';
  }
}

MarginalFile ReadMarginalCsv(std::istream& in, const std::string& source,
                             MarginalRole role) {
  CsvOptions options;
  options.trim_fields = true;
  CsvReader reader(in, options, source);
  std::vector<std::string> fields;
  if (!reader.Next(fields)) {
    ThrowError(ErrorCode::kSchemaMismatch, source + ":1: missing header row");
  }
  if (fields.size() != 3 || fields[2] != "prob" || fields[0] == fields[1] ||
      fields[0].empty() || fields[1].empty()) {
    LineError(reader, "header must be '<var_a>,<var_b>,prob'");
  }
  MarginalFile file;
  file.var_a = fields[0];
  file.var_b = fields[1];
  std::array<double, 4> p{};
  std::array<bool, 4> seen{};
  while (reader.Next(fields)) {
    if (fields.size() != 3) LineError(reader, "expected 3 fields");
    const int a = ParseBit(reader, fields[0], file.var_a);
    const int b = ParseBit(reader, fields[1], file.var_b);
    const std::size_t i = Marginal2::Index(a, b);
    if (seen[i]) LineError(reader, "duplicate cell");
    seen[i] = true;
    p[i] = ParseProbability(reader, fields[2], "prob");
  }
  for (bool s : seen) {
    if (!s) {
      ThrowError(ErrorCode::kSchemaMismatch,
                 source + ": all four (0/1, 0/1) cells are required");
    }
  }
  const double total = p[0] + p[1] + p[2] + p[3];
  const double deviation = std::abs(total - 1.0);
  if (deviation > 1e-6) {
    ThrowError(ErrorCode::kSchemaMismatch,
               source + ": probabilities sum to " + FormatDouble(total) +
                   ", not 1");
  }
  if (deviation > 1e-9) {
    file.warnings.push_back(source + ": probabilities sum to " +
                            FormatDouble(total) + "; renormalised");
  }
  for (double& x : p) x /= total;
  file.marginal = Marginal2::FromProbabilities(p, role);
  return file;
}

MarginalFile ReadMarginalCsv(const std::filesystem::path& path, MarginalRole role) {
  std::ifstream in = OpenOrThrow(path);
  return ReadMarginalCsv(in, path.string(), role);
}

std::array<double, 4> ReadClassifierCsv(std::istream& in, const std::string& source) {
  CsvOptions options;
  options.trim_fields = true;
  CsvReader reader(in, options, source);
  std::vector<std::string> fields;
  if (!reader.Next(fields)) {
    ThrowError(ErrorCode::kSchemaMismatch, source + ":1: missing header row");
  }
  if (fields != std::vector<std::string>{"s", "o", "p_yes"}) {
    LineError(reader, "header must be 's,o,p_yes'");
  }
  std::array<double, 4> p{};
  std::array<bool, 4> seen{};
  while (reader.Next(fields)) {
    if (fields.size() != 3) LineError(reader, "expected 3 fields");
    const int s = ParseBit(reader, fields[0], "s");
    const int o = ParseBit(reader, fields[1], "o");
    const std::size_t i = static_cast<std::size_t>(2 * s + o);
    if (seen[i]) LineError(reader, "duplicate cell");
    seen[i] = true;
    p[i] = ParseProbability(reader, fields[2], "p_yes");
  }
  for (bool s : seen) {
    if (!s) {
      ThrowError(ErrorCode::kSchemaMismatch,
                 source + ": all four (s, o) combinations are required");
    }
  }
  return p;
}

std::array<double, 4> ReadClassifierCsv(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ReadClassifierCsv(in, path.string());
}

VariablePartition PartitionFromJson(const json& j) {
  try {
    VariablePartition p;
    p.internal = j.at("internal").get<std::vector<std::string>>();
    p.external = j.at("external").get<std::vector<std::string>>();
    p.common = j.at("common").get<std::vector<std::string>>();
    for (const auto& [key, _] : j.items()) {
      if (key != "internal" && key != "external" && key != "common") {
        ThrowError(ErrorCode::kSchemaMismatch, "partition: unknown key '" + key + "'");
      }
    }
    p.Validate();
    return p;
  } catch (const json::exception& e) {
    ThrowError(ErrorCode::kSchemaMismatch, std::string("partition: ") + e.what());
  }
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    ThrowError(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace fairbound
