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

// Seeded random sampling with a pinned, portable algorithm.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Everything layered on top of it (uniform doubles, normals, gamma
// and Dirichlet draws, categorical draws) is implemented here rather than via
// <random> distributions, because the standard leaves those unspecified and
// they differ between library vendors:
//
//   Uniform()       (u64 >> 11) * 2^-53, in [0, 1)
//   Normal()        Marsaglia polar method, second variate discarded
//   Gamma(a)        Marsaglia-Tsang (2000); for a < 1, Gamma(a + 1) * U^(1/a)
//   Dirichlet       independent Gamma draws, normalised by their sum
//   UniformIndex(n) rejection sampling on the top bits, unbiased
//
// Sub-streams are derived with SplitMix64 over (seed, stream, index), so a
// seed plus a labelled stream id reproduces the same numbers regardless of
// evaluation order or thread count.

#ifndef FAIRBOUND_RANDOM_H_
#define FAIRBOUND_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairbound {

struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

std::uint64_t SplitMix64(std::uint64_t x);

// Labelled sub-seed: SplitMix64(SplitMix64(seed ^ stream * phi) + index).
RngSeed DeriveSeed(RngSeed base, std::uint64_t stream, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t NextU64() { return engine_(); }
  double Uniform();
  double Normal();
  double Gamma(double shape);
  std::size_t UniformIndex(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::vector<double> SampleDirichlet(Rng& rng, std::span<const double> alpha);
std::vector<double> SampleDirichlet(Rng& rng, std::size_t dim,
                                    double concentration);
// Symmetric Dirichlet(concentration, ..., concentration) of size `dim`.
std::vector<double> SampleDirichlet(std::size_t dim, double concentration,
                                    RngSeed seed);

// Inverse-CDF sampling over a fixed weight vector (need not be normalised).
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> weights);

  std::size_t Sample(Rng& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace fairbound

#endif  // FAIRBOUND_RANDOM_H_
