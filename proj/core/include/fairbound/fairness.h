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

// Propagating a fixed classifier through a joint distribution and the two
// group metrics built on top of it. Group e = 0 is the unprivileged group and
// sits in the numerator of the disparate impact ratio.

#ifndef FAIRBOUND_FAIRNESS_H_
#define FAIRBOUND_FAIRNESS_H_

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairbound/dataset.h"
#include "fairbound/feasible_set.h"
#include "fairbound/prob.h"
#include "fairbound/table.h"

namespace fairbound {

// p(yhat = 1 | features). Tables built without a default rate must cover the
// whole feature domain; with one, missing combinations fall back to it.
class ClassifierTable {
 public:
  ClassifierTable() = default;
  ClassifierTable(std::vector<Variable> features, std::map<Cell, double> p_yes,
                  std::optional<double> default_rate = std::nullopt);

  // Binary (s, o) classifier, indexed 2 s + o.
  static ClassifierTable Binary(const std::array<double, 4>& p_yes);
  static ClassifierTable Constant(double p_yes);

  const std::vector<Variable>& features() const { return features_; }
  const std::map<Cell, double>& entries() const { return p_yes_; }
  std::optional<double> default_rate() const { return default_rate_; }

  double PYes(const Cell& features) const;

  // The (s, o) table as 2 s + o. Throws InvalidArgument unless the classifier
  // has exactly two binary features.
  std::array<double, 4> Binary4() const;

 private:
  std::vector<Variable> features_;
  std::map<Cell, double> p_yes_;
  std::optional<double> default_rate_;
};

struct GroupOutcome {
  double p_yes_given_e0 = 0.0;
  double p_yes_given_e1 = 0.0;
  double p_e0 = 0.0;
  double p_e1 = 0.0;
};

// Throws ZeroGroupMass when either protected group has no mass.
GroupOutcome Propagate(const std::array<double, 4>& p_yes,
                       const BinaryJoint3& joint);
GroupOutcome Propagate(const ClassifierTable& classifier,
                       const BinaryJoint3& joint);

// General form over a table whose variables include every classifier feature
// and the binary `protected_var`; category 0 of it is the e = 0 group.
GroupOutcome Propagate(const ClassifierTable& classifier,
                       const ProbabilityTable& joint,
                       std::string_view protected_var);

// As above with each row of `data` weighted equally.
GroupOutcome Propagate(const ClassifierTable& classifier,
                       const CategoricalDataset& data,
                       std::string_view protected_var);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// e0 / e1; +inf when only the denominator vanishes, NaN for 0 / 0.
double DisparateImpact(const GroupOutcome& g);
double DemographicDisparity(const GroupOutcome& g);

enum class Metric { kDisparateImpact, kDemographicDisparity };

std::string_view MetricName(Metric metric);  // "DI" or "DD"
double Evaluate(Metric metric, const GroupOutcome& g);

struct SummaryOptions {
  double di_cap = 5.0;
  // Swap the roles of e = 0 and e = 1 before computing either metric.
  bool flip_groups = false;
};

GroupOutcome FlipGroups(const GroupOutcome& g);

struct FairnessSummary {
  Metric metric = Metric::kDemographicDisparity;
  std::vector<double> values;  // retained values in grid order
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::optional<double> true_value;
  std::optional<bool> contains_truth;
  std::size_t n_filtered = 0;
  // Set when the truth itself fails the DI filter; callers exclude such
  // scenarios outright.
  bool truth_exceeds_cap = false;

  double range() const { return max - min; }
};

// True for values dropped by the DI filter: above the cap, infinite or NaN.
bool FilteredByCap(double value, double di_cap);

// Metric over every joint of the feasible set. For DI, values caught by
// FilteredByCap are dropped and counted. Throws AllValuesFiltered when
// nothing is left, InvalidArgument on an empty set, and ZeroGroupMass from
// propagation.
FairnessSummary Summarize(const std::array<double, 4>& p_yes,
                          const FeasibleSet& set, Metric metric,
                          const std::optional<BinaryJoint3>& true_joint = {},
                          const SummaryOptions& options = {});
FairnessSummary Summarize(const ClassifierTable& classifier,
                          const FeasibleSet& set, Metric metric,
                          const std::optional<BinaryJoint3>& true_joint = {},
                          const SummaryOptions& options = {});

}  // namespace fairbound

#endif  // FAIRBOUND_FAIRNESS_H_
