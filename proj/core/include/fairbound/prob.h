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

// Dense probability types for three binary variables: the internal feature s,
// the common (overlapping) variable o and the external protected attribute e.

#ifndef FAIRBOUND_PROB_H_
#define FAIRBOUND_PROB_H_

#include <array>
#include <cstddef>
#include <span>

namespace fairbound {

inline constexpr double kNegativeClamp = -1e-12;
inline constexpr double kSumTolerance = 1e-9;

// Joint p(s, o, e) over {0,1}^3, stored s-major: index = 4s + 2o + e.
class BinaryJoint3 {
 public:
  static constexpr std::size_t kSize = 8;

  static constexpr std::size_t Index(int s, int o, int e) {
    return static_cast<std::size_t>(4 * s + 2 * o + e);
  }

  // Entries in [-1e-12, 0) are clamped to zero; anything more negative, a
  // non-finite entry or a total off by more than 1e-9 throws InvalidArgument.
  static BinaryJoint3 FromProbabilities(const std::array<double, kSize>& p);

  // Returns false instead of throwing; used on hot paths that drop
  // infeasible candidates.
  static bool IsAdmissible(const std::array<double, kSize>& p);

  static BinaryJoint3 Uniform();

  double operator()(int s, int o, int e) const { return p_[Index(s, o, e)]; }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::array<double, kSize>& values() const { return p_; }

  // p(e = x) summed over s and o.
  double ExternalMass(int e) const;

 private:
  explicit BinaryJoint3(const std::array<double, kSize>& p) : p_(p) {}

  std::array<double, kSize> p_;
};

// lambda * a + (1 - lambda) * b, lambda in [0, 1].
BinaryJoint3 Mix(double lambda, const BinaryJoint3& a, const BinaryJoint3& b);

// Which pair of variables a two-way table covers. The internal marginal is
// over (s, o), the external over (o, e); the common variable is the second
// axis of the former and the first axis of the latter.
enum class MarginalRole { kInternal, kExternal, kInternalExternal };

// Two-way table p(a, b) over {0,1}^2, stored a-major: index = 2a + b.
class Marginal2 {
 public:
  static constexpr std::size_t Index(int a, int b) {
    return static_cast<std::size_t>(2 * a + b);
  }

  static Marginal2 FromProbabilities(const std::array<double, 4>& p,
                                     MarginalRole role);
  static Marginal2 Uniform(MarginalRole role);

  double operator()(int a, int b) const { return p_[Index(a, b)]; }
  const std::array<double, 4>& values() const { return p_; }
  MarginalRole role() const { return role_; }

 private:
  Marginal2(const std::array<double, 4>& p, MarginalRole role)
      : p_(p), role_(role) {}

  std::array<double, 4> p_;
  MarginalRole role_;
};

// p(value | given) for binary value and given; columns sum to one.
struct ConditionalTable2 {
  std::array<double, 4> p{};  // index = 2 * value + given

  double operator()(int value, int given) const {
    return p[static_cast<std::size_t>(2 * value + given)];
  }
};

enum class AxisPair { kInternalCommon, kCommonExternal, kInternalExternal };

Marginal2 Marginalize(const BinaryJoint3& joint, AxisPair keep);

// Distribution of the common variable o implied by a tagged marginal.
std::array<double, 2> CommonMarginal(const Marginal2& marginal);

// Conditions the non-common variable on the common one: p(s | o) for an
// internal marginal, p(e | o) for an external one. Throws
// ZeroConditioningMass when some p(o) is zero.
ConditionalTable2 ConditionCommon(const Marginal2& marginal);

// KL(p || q) in nats with 0 log 0 = 0. Returns +infinity when q_i = 0 < p_i.
// Throws SupportMismatch when the sizes differ.
double KlDivergence(std::span<const double> p, std::span<const double> q);

}  // namespace fairbound

#endif  // FAIRBOUND_PROB_H_
