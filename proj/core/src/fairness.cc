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

#include "fairbound/fairness.h"

#include <algorithm>
#include <cmath>

#include "fairbound/error.h"

namespace fairbound {
namespace {

void CheckRate(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    ThrowError(ErrorCode::kInvalidArgument,
               std::string(what) + " must lie in [0, 1], got " +
                   std::to_string(p));
  }
}

GroupOutcome Finish(double yes0, double mass0, double yes1, double mass1) {
  if (!(mass0 > 0.0) || !(mass1 > 0.0)) {
    ThrowError(ErrorCode::kZeroGroupMass,
               mass0 > 0.0 ? "protected group e = 1 has zero mass"
                           : "protected group e = 0 has zero mass");
  }
  const double total = mass0 + mass1;
  GroupOutcome g;
  g.p_yes_given_e0 = std::clamp(yes0 / mass0, 0.0, 1.0);
  g.p_yes_given_e1 = std::clamp(yes1 / mass1, 0.0, 1.0);
  g.p_e0 = mass0 / total;
  g.p_e1 = mass1 / total;
  return g;
}

std::vector<std::size_t> FeatureColumns(const ClassifierTable& classifier,
                                        std::span<const Variable> vars) {
  std::vector<std::size_t> columns;
  for (const Variable& f : classifier.features()) {
    const std::size_t i = FindVariable(vars, f.name);
    if (vars[i].domain != f.domain) {
      ThrowError(ErrorCode::kDomainMismatch,
                 "domain of '" + f.name + "' differs from the classifier's");
    }
    columns.push_back(i);
  }
  return columns;
}

std::size_t ProtectedColumn(std::span<const Variable> vars,
                            std::string_view protected_var) {
  const std::size_t i = FindVariable(vars, protected_var);
  if (vars[i].arity() != 2) {
    ThrowError(ErrorCode::kInvalidArgument,
               "protected variable '" + std::string(protected_var) +
                   "' must be binary");
  }
  return i;
}

template <typename Classifier>
FairnessSummary SummarizeImpl(const Classifier& p_yes, const FeasibleSet& set,
                              Metric metric,
                              const std::optional<BinaryJoint3>& true_joint,
                              const SummaryOptions& options) {
  if (set.size() == 0) {
    ThrowError(ErrorCode::kInvalidArgument, "feasible set is empty");
  }
  const auto metric_of = [&](const BinaryJoint3& joint) {
    GroupOutcome g = Propagate(p_yes, joint);
    if (options.flip_groups) g = FlipGroups(g);
    return Evaluate(metric, g);
  };
  const bool capped = metric == Metric::kDisparateImpact;

  FairnessSummary summary;
  summary.metric = metric;
  summary.values.reserve(set.size());
  for (const BinaryJoint3& joint : set.joints) {
    const double v = metric_of(joint);
    if (capped && FilteredByCap(v, options.di_cap)) {
      ++summary.n_filtered;
      continue;
    }
    summary.values.push_back(v);
  }
  if (summary.values.empty()) {
    ThrowError(ErrorCode::kAllValuesFiltered,
               "every DI value was removed by the cap filter");
  }
  double sum = 0.0;
  summary.min = summary.max = summary.values.front();
  for (double v : summary.values) {
    sum += v;
    summary.min = std::min(summary.min, v);
    summary.max = std::max(summary.max, v);
  }
  summary.mean = std::clamp(sum / static_cast<double>(summary.values.size()),
                            summary.min, summary.max);
  if (true_joint) {
    const double t = metric_of(*true_joint);
    summary.true_value = t;
    summary.truth_exceeds_cap = capped && FilteredByCap(t, options.di_cap);
    summary.contains_truth = summary.min <= t && t <= summary.max;
  }
  return summary;
}

}  // namespace

ClassifierTable::ClassifierTable(std::vector<Variable> features,
                                 std::map<Cell, double> p_yes,
                                 std::optional<double> default_rate)
    : features_(std::move(features)),
      p_yes_(std::move(p_yes)),
      default_rate_(default_rate) {
  if (default_rate_) CheckRate(*default_rate_, "default rate");
  for (const auto& [cell, p] : p_yes_) {
    if (cell.size() != features_.size()) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "classifier cell has the wrong number of features");
    }
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (cell[i] < 0 ||
          static_cast<std::size_t>(cell[i]) >= features_[i].arity()) {
        ThrowError(ErrorCode::kInvalidArgument,
                   "classifier cell outside the domain of '" +
                       features_[i].name + "'");
      }
    }
    CheckRate(p, "p_yes");
  }
  if (!default_rate_ && p_yes_.size() != ProductDomainSize(features_)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "classifier does not cover every feature combination");
  }
}

ClassifierTable ClassifierTable::Binary(const std::array<double, 4>& p_yes) {
  const std::vector<std::string> bits = {"0", "1"};
  std::map<Cell, double> entries;
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) entries[{s, o}] = p_yes[2 * s + o];
  }
  return ClassifierTable({{"s", bits}, {"o", bits}}, std::move(entries));
}

ClassifierTable ClassifierTable::Constant(double p_yes) {
  return Binary({p_yes, p_yes, p_yes, p_yes});
}

double ClassifierTable::PYes(const Cell& features) const {
  const auto it = p_yes_.find(features);
  if (it != p_yes_.end()) return it->second;
  if (default_rate_) return *default_rate_;
  ThrowError(ErrorCode::kInvalidArgument, "feature combination not in table");
}

std::array<double, 4> ClassifierTable::Binary4() const {
  if (features_.size() != 2 || features_[0].arity() != 2 ||
      features_[1].arity() != 2) {
    ThrowError(ErrorCode::kInvalidArgument,
               "expected a classifier over two binary features");
  }
  std::array<double, 4> out{};
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) out[2 * s + o] = PYes({s, o});
  }
  return out;
}

GroupOutcome Propagate(const std::array<double, 4>& p_yes,
                       const BinaryJoint3& joint) {
  double yes[2] = {0.0, 0.0};
  double mass[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) {
      for (int e = 0; e < 2; ++e) {
        const double p = joint(s, o, e);
        mass[e] += p;
        yes[e] += p * p_yes[2 * s + o];
      }
    }
  }
  return Finish(yes[0], mass[0], yes[1], mass[1]);
}

GroupOutcome Propagate(const ClassifierTable& classifier,
                       const BinaryJoint3& joint) {
  return Propagate(classifier.Binary4(), joint);
}

GroupOutcome Propagate(const ClassifierTable& classifier,
                       const ProbabilityTable& joint,
                       std::string_view protected_var) {
  const auto& vars = joint.variables();
  const std::vector<std::size_t> columns = FeatureColumns(classifier, vars);
  const std::size_t e_col = ProtectedColumn(vars, protected_var);
  double yes[2] = {0.0, 0.0};
  double mass[2] = {0.0, 0.0};
  Cell features(columns.size());
  for (const auto& [cell, p] : joint.cells()) {
    for (std::size_t i = 0; i < columns.size(); ++i) features[i] = cell[columns[i]];
    const int e = cell[e_col];
    mass[e] += p;
    yes[e] += p * classifier.PYes(features);
  }
  return Finish(yes[0], mass[0], yes[1], mass[1]);
}

GroupOutcome Propagate(const ClassifierTable& classifier,
                       const CategoricalDataset& data,
                       std::string_view protected_var) {
  const auto& vars = data.variables();
  const std::vector<std::size_t> columns = FeatureColumns(classifier, vars);
  const std::size_t e_col = ProtectedColumn(vars, protected_var);
  double yes[2] = {0.0, 0.0};
  double mass[2] = {0.0, 0.0};
  Cell features(columns.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      features[i] = data.at(r, columns[i]);
    }
    const int e = data.at(r, e_col);
    mass[e] += 1.0;
    yes[e] += classifier.PYes(features);
  }
  return Finish(yes[0], mass[0], yes[1], mass[1]);
}

double DisparateImpact(const GroupOutcome& g) {
  if (g.p_yes_given_e1 == 0.0) {
    return g.p_yes_given_e0 > 0.0 ? kInfinity
                                  : std::numeric_limits<double>::quiet_NaN();
  }
  return g.p_yes_given_e0 / g.p_yes_given_e1;
}

double DemographicDisparity(const GroupOutcome& g) {
  return g.p_yes_given_e0 - g.p_yes_given_e1;
}

std::string_view MetricName(Metric metric) {
  return metric == Metric::kDisparateImpact ? "DI" : "DD";
}

double Evaluate(Metric metric, const GroupOutcome& g) {
  return metric == Metric::kDisparateImpact ? DisparateImpact(g)
                                            : DemographicDisparity(g);
}

GroupOutcome FlipGroups(const GroupOutcome& g) {
  return {g.p_yes_given_e1, g.p_yes_given_e0, g.p_e1, g.p_e0};
}

bool FilteredByCap(double value, double di_cap) {
  return !(value <= di_cap);  // also true for NaN
}

FairnessSummary Summarize(const std::array<double, 4>& p_yes,
                          const FeasibleSet& set, Metric metric,
                          const std::optional<BinaryJoint3>& true_joint,
                          const SummaryOptions& options) {
  return SummarizeImpl(p_yes, set, metric, true_joint, options);
}

FairnessSummary Summarize(const ClassifierTable& classifier,
                          const FeasibleSet& set, Metric metric,
                          const std::optional<BinaryJoint3>& true_joint,
                          const SummaryOptions& options) {
  return SummarizeImpl(classifier.Binary4(), set, metric, true_joint, options);
}

}  // namespace fairbound
