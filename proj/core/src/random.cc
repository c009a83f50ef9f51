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

#include "fairbound/random.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairbound/error.h"

namespace fairbound {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngSeed DeriveSeed(RngSeed base, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t mixed =
      SplitMix64(base.value ^ (stream * 0x9E3779B97F4A7C15ULL));
  return RngSeed{SplitMix64(mixed + index)};
}

Rng::Rng(RngSeed seed) : engine_(seed.value) {}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  while (true) {
    const double u = 2.0 * Uniform() - 1.0;
    const double v = 2.0 * Uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double Rng::Gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double boosted = Gamma(shape + 1.0);
    double u = Uniform();
    while (u == 0.0) u = Uniform();
    return boosted * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = Normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = Uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::size_t Rng::UniformIndex(std::size_t n) {
  if (n == 0) {
    ThrowError(ErrorCode::kInvalidArgument, "UniformIndex over empty range");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Largest multiple of n that fits; draws above it are rejected.
  const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::vector<double> SampleDirichlet(Rng& rng, std::span<const double> alpha) {
  if (alpha.size() < 2) {
    ThrowError(ErrorCode::kInvalidArgument, "Dirichlet dimension must be >= 2");
  }
  std::vector<double> draw(alpha.size());
  while (true) {
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      draw[i] = rng.Gamma(alpha[i]);
      total += draw[i];
    }
    // All-zero draws only happen through underflow at tiny concentrations.
    if (total > 0.0 && std::isfinite(total)) {
      for (double& x : draw) x /= total;
      return draw;
    }
  }
}

std::vector<double> SampleDirichlet(Rng& rng, std::size_t dim,
                                    double concentration) {
  if (!(concentration > 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "Dirichlet concentration must be positive");
  }
  const std::vector<double> alpha(dim, concentration);
  return SampleDirichlet(rng, alpha);
}

std::vector<double> SampleDirichlet(std::size_t dim, double concentration,
                                    RngSeed seed) {
  Rng rng(seed);
  return SampleDirichlet(rng, dim, concentration);
}

CategoricalSampler::CategoricalSampler(std::span<const double> weights) {
  if (weights.empty()) {
    ThrowError(ErrorCode::kInvalidArgument, "categorical sampler needs weights");
  }
  cumulative_.reserve(weights.size());
  double running = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "categorical weights must be finite and non-negative");
    }
    running += w;
    cumulative_.push_back(running);
  }
  if (!(running > 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument, "categorical weights sum to zero");
  }
}

std::size_t CategoricalSampler::Sample(Rng& rng) const {
  const double target = rng.Uniform() * cumulative_.back();
  // First index whose cumulative weight exceeds the target; zero-weight cells
  // can never be selected.
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // target == total can only arise from rounding; take the last
    // positive-weight cell.
    std::size_t i = cumulative_.size() - 1;
    while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace fairbound
