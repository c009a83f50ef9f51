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

// Monte Carlo study of feasible-set bounds: random ground-truth joints and
// classifiers, internal marginals distorted by per-slice scaling, and
// aggregation of bias, range and coverage by the KL divergence between the
// two common-variable marginals.

#ifndef FAIRBOUND_SIMULATION_H_
#define FAIRBOUND_SIMULATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairbound/fairness.h"
#include "fairbound/feasible_set.h"
#include "fairbound/prob.h"
#include "fairbound/random.h"

namespace fairbound {

struct Distortion {
  double alpha = 1.0;  // scale of the o = 0 slice
  double beta = 1.0;   // scale of the o = 1 slice
};

// Identity first, then for each ratio r in {1.1, 1.25, 1.5, 2, 3, 5}:
// (r, 1), (1, r), (r, 1/r), (1/r, r). 25 variants in total.
std::vector<Distortion> DefaultVariants();

struct ScenarioConfig {
  int n_ground_truths = 200;
  std::vector<Distortion> variants = DefaultVariants();
  double classifier_concentration = 1.0;
  double joint_concentration = 1.0;
  int grid_resolution = 100;
  BoxPolicy box_policy = BoxPolicy::kStandard;
  double di_cap = 5.0;
  // Ground truths with any single-variable marginal cell below this are
  // redrawn.
  double min_marginal_mass = 1e-3;
  RngSeed seed{0};

  static ScenarioConfig Desk();        // 200 x 25
  static ScenarioConfig FullScale();  // 1000 x 25

  void Validate() const;
};

struct GroundTruth {
  BinaryJoint3 joint = BinaryJoint3::Uniform();
  int rejections = 0;
};

// Both are deterministic in (cfg.seed, index).
GroundTruth GenGroundTruth(const ScenarioConfig& cfg, std::uint64_t index);
// p(yhat = 1 | s, o) indexed 2 s + o, each the first coordinate of a
// two-dimensional Dirichlet draw.
std::array<double, 4> GenClassifier(const ScenarioConfig& cfg,
                                    std::uint64_t index);

// Scales the o = 0 cells by alpha and the o = 1 cells by beta, then
// renormalises. Throws InvalidArgument for non-positive factors and
// DegenerateResult when the scaled mass is below 1e-12.
Marginal2 DistortMarginal(const Marginal2& internal, double alpha, double beta);

enum class ExclusionReason {
  kNone,
  kDiCap,
  kEmptyFeasibleSet,
  kZeroGroupMass,
  kAllFiltered,
};

std::string_view ExclusionReasonName(ExclusionReason reason);

struct MetricResult {
  double true_value = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  bool contains_truth = false;
  std::size_t n_filtered = 0;
};

struct ScenarioResult {
  std::uint64_t id = 0;
  int truth_index = 0;
  int variant_index = 0;
  Distortion distortion;
  double kl_common = 0.0;
  MarginalMode mode = MarginalMode::kConsistent;
  std::size_t n_feasible = 0;
  MetricResult dd;
  MetricResult di;
  // DI envelope before the cap filter, over finite values.
  double di_min_unfiltered = 0.0;
  double di_max_unfiltered = 0.0;
  bool excluded = false;
  ExclusionReason reason = ExclusionReason::kNone;
};

// Never throws for mathematical outcomes; those become exclusions.
ScenarioResult RunScenario(const BinaryJoint3& truth,
                           const std::array<double, 4>& classifier,
                           const Distortion& distortion,
                           const ScenarioConfig& cfg);

inline constexpr std::array<double, 6> kKlBinEdges = {0.0,  0.01, 0.05,
                                                      0.1,  0.3,  0.5};

// Index of the bin holding `kl` among [0, 0.01), [0.01, 0.05), [0.05, 0.1),
// [0.1, 0.3), [0.3, 0.5), [0.5, inf].
std::size_t KlBin(double kl);
std::string KlBinLabel(std::size_t bin);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct BinStats {
  std::string label;
  std::size_t n_scenarios = 0;  // non-excluded
  std::size_t n_excluded = 0;
  double avg_diff_dd = 0.0;  // true - mean estimate
  double avg_diff_di = 0.0;
  double avg_range_dd = 0.0;
  double avg_range_di = 0.0;
  double avg_range_di_unfiltered = 0.0;
  double coverage_rate_dd = 0.0;
  double coverage_rate_di = 0.0;
  double coverage_rate = 0.0;  // both metrics contained
};

struct AggregateReport {
  std::vector<BinStats> bins;
  std::size_t n_total = 0;
  std::size_t n_scenarios = 0;
  std::size_t n_excluded = 0;
  std::size_t n_excluded_di_cap = 0;
  std::size_t n_excluded_empty = 0;
  std::size_t n_excluded_zero_mass = 0;
  std::size_t n_excluded_all_filtered = 0;
  MeanStd diff_dd;
  MeanStd diff_di;
  MeanStd range_dd;
  MeanStd range_di;
  double mean_feasible_size = 0.0;
  std::size_t n_consistent = 0;
  double consistent_coverage_dd = 0.0;
  double consistent_coverage_di = 0.0;
  std::size_t ground_truth_rejections = 0;
};

AggregateReport Aggregate(const std::vector<ScenarioResult>& results,
                          std::size_t ground_truth_rejections = 0);

struct StudyResult {
  std::vector<ScenarioResult> scenarios;  // sorted by id
  AggregateReport report;
};

// Every ground truth crossed with every variant; scenario id is
// truth_index * n_variants + variant_index. `threads` = 0 reads
// FAIRBOUND_THREADS and falls back to one thread. Output does not depend on
// the thread count.
StudyResult RunStudy(const ScenarioConfig& cfg, unsigned threads = 0);

}  // namespace fairbound

#endif  // FAIRBOUND_SIMULATION_H_
