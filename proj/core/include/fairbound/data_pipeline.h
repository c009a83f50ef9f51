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

// Real-data experiments: splitting a complete dataset into an internal and an
// external marginal dataset, an empirical classifier, the bootstrap
// evaluation of the structural estimators, and feasible-set bounds on a
// three-variable binary reduction.

#ifndef FAIRBOUND_DATA_PIPELINE_H_
#define FAIRBOUND_DATA_PIPELINE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbound/dataset.h"
#include "fairbound/fairness.h"
#include "fairbound/feasible_set.h"
#include "fairbound/random.h"
#include "fairbound/recipe.h"
#include "fairbound/structural.h"

namespace fairbound {

// Reduces one categorical column to {0, 1}: 1 when the label is one of
// `one_values`, or when its numeric value is >= `at_least`.
struct BinarySpec {
  std::string name;
  std::string column;
  std::vector<std::string> one_values;
  std::optional<double> at_least;

  int Apply(const std::string& label) const;
};

inline constexpr int kSplitFormatVersion = 1;

struct SplitSpec {
  std::string name;
  std::string label;
  std::string favourable;
  std::string protected_attribute;
  std::vector<std::string> overlap;
  std::vector<std::string> external;  // includes overlap and protected
  std::vector<std::string> internal;  // includes overlap; empty = the rest
  double holdout_fraction = 0.3;
  double train_fraction = 0.5;     // of the rows left after the holdout
  double internal_fraction = 0.5;  // of the rows left after training
  // When true, internal and external are projections of the same rows.
  bool shared_marginal_rows = false;
  bool hard_classifier = false;

  // s (internal), o (overlap), e (protected). Unset when the split has no
  // binary reduction.
  std::optional<std::array<BinarySpec, 3>> binary;

  // Fills label/favourable/protected from the recipe where unset, and the
  // internal column list from the dataset.
  void Resolve(const DatasetRecipe& recipe, const CategoricalDataset& data);
  // Throws SchemaMismatch or InvalidArgument.
  void Validate(const CategoricalDataset& data) const;
};

SplitSpec ParseSplitSpec(const nlohmann::json& j);
SplitSpec LoadSplitSpec(const std::filesystem::path& path);

struct DataSplits {
  CategoricalDataset internal;  // internal columns only
  CategoricalDataset external;  // external columns only
  CategoricalDataset train;     // all columns
  CategoricalDataset test;      // all columns
  std::vector<std::size_t> internal_rows;
  std::vector<std::size_t> external_rows;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Shuffles row ids with the seed and cuts them into test, train, internal and
// external blocks. Throws InsufficientRows when a block would be empty.
DataSplits Split(const CategoricalDataset& data, const SplitSpec& spec,
                 RngSeed seed);

// p_yes for each observed feature combination is the fraction of rows whose
// label is `favourable`; unseen combinations get the overall rate. With
// `hard`, rates are rounded to 0 or 1 (ties at 0.5 go to 1).
ClassifierTable TrainEmpiricalClassifier(const CategoricalDataset& train,
                                         std::span<const std::string> features,
                                         std::string_view label,
                                         std::string_view favourable,
                                         bool hard = false);

enum class StructuralMethod { kLatent, kMarginal };
std::string_view MethodName(StructuralMethod method);  // "latent" / "marginal"

struct EvalReport {
  std::string method;
  Metric metric = Metric::kDisparateImpact;
  double true_value = 0.0;
  double bootstrap_mean = 0.0;
  double bootstrap_std = 0.0;
  double abs_diff = 0.0;
  int B = 0;
  std::size_t n_undefined = 0;  // bootstrap draws with an empty group
  std::vector<double> samples;
};

// Draws n rows from some distribution, deterministically in the seed.
using RowSampler = std::function<CategoricalDataset(std::size_t n, RngSeed seed)>;

struct BootstrapResult {
  std::vector<double> di;
  std::vector<double> dd;
  std::size_t n_undefined = 0;
};

// B draws of n rows; draw b uses DeriveSeed(seed, b). Draws where a group is
// empty, or where DI is not finite, are counted and skipped.
BootstrapResult Bootstrap(const RowSampler& sampler, std::size_t n, int B,
                          RngSeed seed, const ClassifierTable& classifier,
                          std::string_view protected_var);

EvalReport MakeEvalReport(std::string method, Metric metric, double true_value,
                          std::vector<double> samples, int B,
                          std::size_t n_undefined);

struct StructuralEvaluation {
  EvalReport di;
  EvalReport dd;
  std::vector<std::string> warnings;
};

// Fits the estimator to splits.internal and splits.external, bootstraps
// test-sized samples from it and compares the classifier's metrics with
// those on splits.test. Throws UndefinedMetric when a protected group is
// empty in the test set.
StructuralEvaluation EvaluateStructural(const DataSplits& splits,
                                        const SplitSpec& spec,
                                        const ClassifierTable& classifier,
                                        StructuralMethod method,
                                        const EMConfig& em, int B, RngSeed seed);

// Columns s, o, e (named after the binary specs) plus the binarised label
// (1 = favourable) named after the label.
CategoricalDataset Binarize(const CategoricalDataset& data, const SplitSpec& spec);

// Joint over three binary variables of `table`, in (s, o, e) order.
BinaryJoint3 ToBinaryJoint3(const ProbabilityTable& table,
                            std::span<const std::string> names);

struct FeasibleExperimentOptions {
  int grid_resolution = 100;
  BoxPolicy box_policy = BoxPolicy::kStandard;
  double di_cap = 5.0;
  EMConfig em;
};

struct PointEstimate {
  double di = 0.0;
  double dd = 0.0;
};

struct FeasibleExperimentResult {
  Marginal2 internal = Marginal2::Uniform(MarginalRole::kInternal);
  Marginal2 external = Marginal2::Uniform(MarginalRole::kExternal);
  MarginalMode mode = MarginalMode::kConsistent;
  std::array<double, 4> classifier{};
  BinaryJoint3 truth = BinaryJoint3::Uniform();
  FeasibleSet set;
  FairnessSummary di;
  FairnessSummary dd;
  PointEstimate latent;
  PointEstimate marginal;
  // Every retained feasible DI value is below 0.8.
  bool di_below_eeoc = false;
};

// Binarises the dataset, takes the internal marginal over (s, o) and the
// external marginal over (o, e) from all rows, trains the classifier on
// (s, o) and summarises both metrics with the truth from the full joint.
FeasibleExperimentResult RunFeasibleExperiment(
    const CategoricalDataset& data, const SplitSpec& spec,
    const FeasibleExperimentOptions& options = {});

}  // namespace fairbound

#endif  // FAIRBOUND_DATA_PIPELINE_H_
