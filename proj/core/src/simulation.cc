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

#include "fairbound/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "fairbound/error.h"

namespace fairbound {
namespace {

// Sub-stream labels for DeriveSeed.
constexpr std::uint64_t kGroundTruthStream = 1;
constexpr std::uint64_t kClassifierStream = 2;

constexpr int kMaxRejections = 100000;

bool MarginalsAboveFloor(const BinaryJoint3& j, double floor) {
  double s0 = 0.0, o0 = 0.0, e0 = 0.0;
  for (int o = 0; o < 2; ++o) {
    for (int e = 0; e < 2; ++e) s0 += j(0, o, e);
  }
  for (int s = 0; s < 2; ++s) {
    for (int e = 0; e < 2; ++e) o0 += j(s, 0, e);
  }
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) e0 += j(s, o, 0);
  }
  for (double m : {s0, o0, e0}) {
    if (m < floor || 1.0 - m < floor) return false;
  }
  return true;
}

unsigned ThreadsFromEnv() {
  if (const char* env = std::getenv("FAIRBOUND_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void Add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double Mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  MeanStd Stats() const {
    if (n == 0) return {};
    const double mean = Mean();
    const double var =
        n > 1 ? std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                                  static_cast<double>(n - 1))
              : 0.0;
    return {mean, std::sqrt(var)};
  }
};

}  // namespace

std::vector<Distortion> DefaultVariants() {
  std::vector<Distortion> out = {{1.0, 1.0}};
  for (double r : {1.1, 1.25, 1.5, 2.0, 3.0, 5.0}) {
    out.push_back({r, 1.0});
    out.push_back({1.0, r});
    out.push_back({r, 1.0 / r});
    out.push_back({1.0 / r, r});
  }
  return out;
}

ScenarioConfig ScenarioConfig::Desk() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::FullScale() {
  ScenarioConfig cfg;
  cfg.n_ground_truths = 1000;
  return cfg;
}

void ScenarioConfig::Validate() const {
  if (n_ground_truths < 1 || variants.empty()) {
    ThrowError(ErrorCode::kInvalidArgument,
               "study needs at least one ground truth and one variant");
  }
  if (!(classifier_concentration > 0.0) || !(joint_concentration > 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument, "concentrations must be positive");
  }
  for (const Distortion& d : variants) {
    if (!(d.alpha > 0.0) || !(d.beta > 0.0)) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "distortion factors must be positive");
    }
  }
  if (grid_resolution < 2) {
    ThrowError(ErrorCode::kInvalidArgument, "grid_resolution must be >= 2");
  }
  if (!(di_cap > 0.0) || !(min_marginal_mass >= 0.0 && min_marginal_mass < 0.5)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "di_cap must be positive and min_marginal_mass in [0, 0.5)");
  }
}

GroundTruth GenGroundTruth(const ScenarioConfig& cfg, std::uint64_t index) {
  Rng rng(DeriveSeed(cfg.seed, kGroundTruthStream, index));
  GroundTruth out;
  while (true) {
    const std::vector<double> draw =
        SampleDirichlet(rng, BinaryJoint3::kSize, cfg.joint_concentration);
    std::array<double, BinaryJoint3::kSize> p{};
    std::copy(draw.begin(), draw.end(), p.begin());
    out.joint = BinaryJoint3::FromProbabilities(p);
    if (MarginalsAboveFloor(out.joint, cfg.min_marginal_mass)) return out;
    if (++out.rejections >= kMaxRejections) {
      ThrowError(ErrorCode::kDegenerateResult,
                 "ground-truth rejection sampling did not terminate");
    }
  }
}

std::array<double, 4> GenClassifier(const ScenarioConfig& cfg,
                                    std::uint64_t index) {
  Rng rng(DeriveSeed(cfg.seed, kClassifierStream, index));
  std::array<double, 4> p_yes{};
  for (double& p : p_yes) {
    p = SampleDirichlet(rng, 2, cfg.classifier_concentration)[0];
  }
  return p_yes;
}

Marginal2 DistortMarginal(const Marginal2& internal, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "distortion factors must be positive");
  }
  std::array<double, 4> p{};
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) {
      const double v = internal(s, o) * (o == 0 ? alpha : beta);
      p[Marginal2::Index(s, o)] = v;
      total += v;
    }
  }
  if (total < 1e-12) {
    ThrowError(ErrorCode::kDegenerateResult,
               "distorted marginal has no mass left to renormalise");
  }
  for (double& v : p) v /= total;
  return Marginal2::FromProbabilities(p, internal.role());
}

std::string_view ExclusionReasonName(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::kNone:
      return "";
    case ExclusionReason::kDiCap:
      return "di_cap";
    case ExclusionReason::kEmptyFeasibleSet:
      return "empty_feasible_set";
    case ExclusionReason::kZeroGroupMass:
      return "zero_group_mass";
    case ExclusionReason::kAllFiltered:
      return "all_values_filtered";
  }
  return "";
}

ScenarioResult RunScenario(const BinaryJoint3& truth,
                           const std::array<double, 4>& classifier,
                           const Distortion& distortion,
                           const ScenarioConfig& cfg) {
  ScenarioResult result;
  result.distortion = distortion;
  const auto exclude = [&](ExclusionReason reason) {
    result.excluded = true;
    result.reason = reason;
    return result;
  };

  FeasibleSpec spec;
  spec.external = Marginalize(truth, AxisPair::kCommonExternal);
  spec.internal = DistortMarginal(Marginalize(truth, AxisPair::kInternalCommon),
                                  distortion.alpha, distortion.beta);
  spec.mode = DetectMode(spec.internal, spec.external);
  spec.grid_resolution = cfg.grid_resolution;
  spec.box_policy = cfg.box_policy;
  result.mode = spec.mode;
  const auto pi = CommonMarginal(spec.internal);
  const auto pe = CommonMarginal(spec.external);
  result.kl_common = KlDivergence(pi, pe);

  GroupOutcome true_groups;
  try {
    true_groups = Propagate(classifier, truth);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroGroupMass) {
      return exclude(ExclusionReason::kZeroGroupMass);
    }
    throw;
  }
  result.dd.true_value = DemographicDisparity(true_groups);
  result.di.true_value = DisparateImpact(true_groups);

  FeasibleSet set;
  try {
    set = Enumerate(spec);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyFeasibleSet) {
      return exclude(ExclusionReason::kEmptyFeasibleSet);
    }
    throw;
  }
  result.n_feasible = set.size();
  if (set.size() == 0) return exclude(ExclusionReason::kEmptyFeasibleSet);

  bool any_finite = false;
  for (const BinaryJoint3& joint : set.joints) {
    const double v = DisparateImpact(Propagate(classifier, joint));
    if (!std::isfinite(v)) continue;
    if (!any_finite) {
      result.di_min_unfiltered = result.di_max_unfiltered = v;
      any_finite = true;
    }
    result.di_min_unfiltered = std::min(result.di_min_unfiltered, v);
    result.di_max_unfiltered = std::max(result.di_max_unfiltered, v);
  }

  SummaryOptions options;
  options.di_cap = cfg.di_cap;
  const auto copy_summary = [](const FairnessSummary& s, MetricResult& out) {
    out.min = s.min;
    out.mean = s.mean;
    out.max = s.max;
    out.contains_truth = s.contains_truth.value_or(false);
    out.n_filtered = s.n_filtered;
  };
  try {
    copy_summary(Summarize(classifier, set, Metric::kDemographicDisparity, truth,
                           options),
                 result.dd);
    if (FilteredByCap(result.di.true_value, cfg.di_cap)) {
      return exclude(ExclusionReason::kDiCap);
    }
    copy_summary(
        Summarize(classifier, set, Metric::kDisparateImpact, truth, options),
        result.di);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kZeroGroupMass:
        return exclude(ExclusionReason::kZeroGroupMass);
      case ErrorCode::kAllValuesFiltered:
        return exclude(ExclusionReason::kAllFiltered);
      default:
        throw;
    }
  }
  return result;
}

std::size_t KlBin(double kl) {
  for (std::size_t b = kKlBinEdges.size() - 1; b > 0; --b) {
    if (kl >= kKlBinEdges[b]) return b;
  }
  return 0;
}

std::string KlBinLabel(std::size_t bin) {
  static const char* const kLabels[] = {"0-0.01",  "0.01-0.05", "0.05-0.1",
                                        "0.1-0.3", "0.3-0.5",   "0.5+"};
  return kLabels[bin];
}

AggregateReport Aggregate(const std::vector<ScenarioResult>& results,
                          std::size_t ground_truth_rejections) {
  struct BinAcc {
    Accumulator diff_dd, diff_di, range_dd, range_di, range_di_raw;
    std::size_t cover_dd = 0, cover_di = 0, cover_both = 0, excluded = 0;
  };
  std::vector<BinAcc> acc(kKlBinEdges.size());
  Accumulator diff_dd, diff_di, range_dd, range_di, feasible;
  std::size_t consistent = 0, consistent_dd = 0, consistent_di = 0;

  AggregateReport report;
  report.n_total = results.size();
  report.ground_truth_rejections = ground_truth_rejections;
  for (const ScenarioResult& r : results) {
    BinAcc& bin = acc[KlBin(r.kl_common)];
    if (r.excluded) {
      ++bin.excluded;
      ++report.n_excluded;
      switch (r.reason) {
        case ExclusionReason::kDiCap:
          ++report.n_excluded_di_cap;
          break;
        case ExclusionReason::kEmptyFeasibleSet:
          ++report.n_excluded_empty;
          break;
        case ExclusionReason::kZeroGroupMass:
          ++report.n_excluded_zero_mass;
          break;
        case ExclusionReason::kAllFiltered:
          ++report.n_excluded_all_filtered;
          break;
        case ExclusionReason::kNone:
          break;
      }
      continue;
    }
    ++report.n_scenarios;
    const double dd = r.dd.true_value - r.dd.mean;
    const double di = r.di.true_value - r.di.mean;
    bin.diff_dd.Add(dd);
    bin.diff_di.Add(di);
    bin.range_dd.Add(r.dd.max - r.dd.min);
    bin.range_di.Add(r.di.max - r.di.min);
    bin.range_di_raw.Add(r.di_max_unfiltered - r.di_min_unfiltered);
    bin.cover_dd += r.dd.contains_truth;
    bin.cover_di += r.di.contains_truth;
    bin.cover_both += r.dd.contains_truth && r.di.contains_truth;
    diff_dd.Add(dd);
    diff_di.Add(di);
    range_dd.Add(r.dd.max - r.dd.min);
    range_di.Add(r.di.max - r.di.min);
    feasible.Add(static_cast<double>(r.n_feasible));
    if (r.mode == MarginalMode::kConsistent) {
      ++consistent;
      consistent_dd += r.dd.contains_truth;
      consistent_di += r.di.contains_truth;
    }
  }
  const auto rate = [](std::size_t k, std::size_t n) {
    return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
  };
  for (std::size_t b = 0; b < acc.size(); ++b) {
    BinStats stats;
    stats.label = KlBinLabel(b);
    stats.n_scenarios = acc[b].diff_dd.n;
    stats.n_excluded = acc[b].excluded;
    stats.avg_diff_dd = acc[b].diff_dd.Mean();
    stats.avg_diff_di = acc[b].diff_di.Mean();
    stats.avg_range_dd = acc[b].range_dd.Mean();
    stats.avg_range_di = acc[b].range_di.Mean();
    stats.avg_range_di_unfiltered = acc[b].range_di_raw.Mean();
    stats.coverage_rate_dd = rate(acc[b].cover_dd, stats.n_scenarios);
    stats.coverage_rate_di = rate(acc[b].cover_di, stats.n_scenarios);
    stats.coverage_rate = rate(acc[b].cover_both, stats.n_scenarios);
    report.bins.push_back(stats);
  }
  report.diff_dd = diff_dd.Stats();
  report.diff_di = diff_di.Stats();
  report.range_dd = range_dd.Stats();
  report.range_di = range_di.Stats();
  report.mean_feasible_size = feasible.Mean();
  report.n_consistent = consistent;
  report.consistent_coverage_dd = rate(consistent_dd, consistent);
  report.consistent_coverage_di = rate(consistent_di, consistent);
  return report;
}

StudyResult RunStudy(const ScenarioConfig& cfg, unsigned threads) {
  cfg.Validate();
  if (threads == 0) threads = ThreadsFromEnv();
  const std::size_t n_truths = static_cast<std::size_t>(cfg.n_ground_truths);
  const std::size_t n_variants = cfg.variants.size();
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, n_truths));

  StudyResult study;
  study.scenarios.resize(n_truths * n_variants);
  std::vector<int> rejections(n_truths, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  const auto worker = [&] {
    try {
      for (std::size_t t = next++; t < n_truths && !failed; t = next++) {
        const GroundTruth truth = GenGroundTruth(cfg, t);
        const std::array<double, 4> classifier = GenClassifier(cfg, t);
        rejections[t] = truth.rejections;
        for (std::size_t v = 0; v < n_variants; ++v) {
          ScenarioResult r =
              RunScenario(truth.joint, classifier, cfg.variants[v], cfg);
          r.id = t * n_variants + v;
          r.truth_index = static_cast<int>(t);
          r.variant_index = static_cast<int>(v);
          study.scenarios[r.id] = r;
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t total_rejections = 0;
  for (int r : rejections) total_rejections += static_cast<std::size_t>(r);
  study.report = Aggregate(study.scenarios, total_rejections);
  return study;
}

}  // namespace fairbound
