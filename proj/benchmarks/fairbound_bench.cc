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


#include <array>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "fairbound/fairness.h"
#include "fairbound/feasible_set.h"
#include "fairbound/prob.h"
#include "fairbound/simulation.h"
#include "fairbound/structural.h"

namespace fairbound {
namespace {

const BinaryJoint3 kTruth = BinaryJoint3::FromProbabilities(
    {0.15, 0.2, 0.1, 0.05, 0.1, 0.05, 0.15, 0.2});
constexpr std::array<double, 4> kClassifier = {0.2, 0.7, 0.4, 0.9};

FeasibleSpec Spec(int resolution) {
  FeasibleSpec spec;
  spec.internal = Marginalize(kTruth, AxisPair::kInternalCommon);
  spec.external = Marginalize(kTruth, AxisPair::kCommonExternal);
  spec.grid_resolution = resolution;
  return spec;
}

void BM_Enumerate(benchmark::State& state) {
  const FeasibleSpec spec = Spec(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    FeasibleSet set = Enumerate(spec);
    benchmark::DoNotOptimize(set.joints.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Enumerate)->Arg(20)->Arg(100)->Arg(300);

void BM_Summarize(benchmark::State& state) {
  const FeasibleSet set = Enumerate(Spec(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    FairnessSummary s =
        Summarize(kClassifier, set, Metric::kDisparateImpact, kTruth);
    benchmark::DoNotOptimize(s.mean);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(set.joints.size()));
}
BENCHMARK(BM_Summarize)->Arg(100)->Arg(300);

void BM_RunScenario(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.grid_resolution = static_cast<int>(state.range(0));
  const Distortion d = cfg.variants[5];
  for (auto _ : state) {
    ScenarioResult r = RunScenario(kTruth, kClassifier, d, cfg);
    benchmark::DoNotOptimize(r.dd.mean);
  }
}
BENCHMARK(BM_RunScenario)->Arg(100);

LatentNBModel BenchModel(int n_vars) {
  LatentNBModel m;
  m.K = 2;
  m.pi = {0.4, 0.6};
  for (int i = 0; i < n_vars; ++i) {
    m.variables.push_back({"v" + std::to_string(i), {"0", "1"}});
    const double a = (i % 2 == 0) ? 0.85 : 0.25;
    m.cond.push_back({a, 1.0 - a, 1.0 - a, a});
  }
  return m;
}

void BM_FitLatentNB(benchmark::State& state) {
  const LatentNBModel truth = BenchModel(7);
  const VariablePartition part{{"v0", "v1", "v2"}, {"v3", "v4"}, {"v5", "v6"}};
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const CategoricalDataset all = SampleModel(truth, 2 * n, RngSeed{5});
  std::vector<std::size_t> first(n), second(n);
  for (std::size_t i = 0; i < n; ++i) {
    first[i] = i;
    second[i] = n + i;
  }
  const std::vector<std::string> v1 = {"v0", "v1", "v2", "v5", "v6"};
  const std::vector<std::string> v2 = {"v3", "v4", "v5", "v6"};
  const CategoricalDataset d1 = all.SelectRows(first).Project(v1);
  const CategoricalDataset d2 = all.SelectRows(second).Project(v2);
  EMConfig cfg;
  cfg.K = 2;
  cfg.n_restarts = 1;
  cfg.max_iters = 100;
  for (auto _ : state) {
    EMFit fit = FitLatentNB(d1, d2, part, cfg);
    benchmark::DoNotOptimize(fit.final_elbo);
  }
}
BENCHMARK(BM_FitLatentNB)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairbound

BENCHMARK_MAIN();
