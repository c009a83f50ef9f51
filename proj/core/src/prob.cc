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

#include "fairbound/prob.h"

#include <cmath>
#include <limits>
#include <string>

#include "fairbound/error.h"

namespace fairbound {
namespace {

template <std::size_t N>
std::array<double, N> ClampAndValidate(const std::array<double, N>& p,
                                       const char* what) {
  std::array<double, N> out = p;
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(out[i])) {
      ThrowError(ErrorCode::kInvalidArgument,
                 std::string(what) + " has a non-finite entry");
    }
    if (out[i] < 0.0) {
      if (out[i] < kNegativeClamp) {
        ThrowError(ErrorCode::kInvalidArgument,
                   std::string(what) + " entry " + std::to_string(i) +
                       " is negative: " + std::to_string(out[i]));
      }
      out[i] = 0.0;
    }
    total += out[i];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    ThrowError(ErrorCode::kInvalidArgument,
               std::string(what) + " sums to " + std::to_string(total));
  }
  return out;
}

}  // namespace

BinaryJoint3 BinaryJoint3::FromProbabilities(
    const std::array<double, kSize>& p) {
  return BinaryJoint3(ClampAndValidate(p, "joint"));
}

bool BinaryJoint3::IsAdmissible(const std::array<double, kSize>& p) {
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < kNegativeClamp) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= kSumTolerance;
}

BinaryJoint3 BinaryJoint3::Uniform() {
  std::array<double, kSize> p;
  p.fill(1.0 / kSize);
  return BinaryJoint3(p);
}

double BinaryJoint3::ExternalMass(int e) const {
  return (*this)(0, 0, e) + (*this)(0, 1, e) + (*this)(1, 0, e) +
         (*this)(1, 1, e);
}

BinaryJoint3 Mix(double lambda, const BinaryJoint3& a, const BinaryJoint3& b) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    ThrowError(ErrorCode::kInvalidArgument, "mixing weight outside [0, 1]");
  }
  std::array<double, BinaryJoint3::kSize> p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  }
  return BinaryJoint3::FromProbabilities(p);
}

Marginal2 Marginal2::FromProbabilities(const std::array<double, 4>& p,
                                       MarginalRole role) {
  return Marginal2(ClampAndValidate(p, "marginal"), role);
}

Marginal2 Marginal2::Uniform(MarginalRole role) {
  return Marginal2({0.25, 0.25, 0.25, 0.25}, role);
}

Marginal2 Marginalize(const BinaryJoint3& j, AxisPair keep) {
  std::array<double, 4> m{};
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) {
      for (int e = 0; e < 2; ++e) {
        const double v = j(s, o, e);
        switch (keep) {
          case AxisPair::kInternalCommon:
            m[Marginal2::Index(s, o)] += v;
            break;
          case AxisPair::kCommonExternal:
            m[Marginal2::Index(o, e)] += v;
            break;
          case AxisPair::kInternalExternal:
            m[Marginal2::Index(s, e)] += v;
            break;
        }
      }
    }
  }
  const MarginalRole role = keep == AxisPair::kInternalCommon
                                ? MarginalRole::kInternal
                            : keep == AxisPair::kCommonExternal
                                ? MarginalRole::kExternal
                                : MarginalRole::kInternalExternal;
  return Marginal2::FromProbabilities(m, role);
}

std::array<double, 2> CommonMarginal(const Marginal2& m) {
  switch (m.role()) {
    case MarginalRole::kInternal:
      return {m(0, 0) + m(1, 0), m(0, 1) + m(1, 1)};
    case MarginalRole::kExternal:
      return {m(0, 0) + m(0, 1), m(1, 0) + m(1, 1)};
    case MarginalRole::kInternalExternal:
      break;
  }
  ThrowError(ErrorCode::kInvalidArgument,
             "an (s, e) marginal has no common variable");
}

ConditionalTable2 ConditionCommon(const Marginal2& m) {
  const std::array<double, 2> common = CommonMarginal(m);
  ConditionalTable2 out;
  for (int given = 0; given < 2; ++given) {
    if (!(common[given] > 0.0)) {
      ThrowError(ErrorCode::kZeroConditioningMass,
                 "common variable value " + std::to_string(given) +
                     " has zero mass");
    }
    for (int value = 0; value < 2; ++value) {
      const double cell =
          m.role() == MarginalRole::kInternal ? m(value, given) : m(given, value);
      out.p[static_cast<std::size_t>(2 * value + given)] = cell / common[given];
    }
  }
  return out;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    ThrowError(ErrorCode::kSupportMismatch,
               "distributions have sizes " + std::to_string(p.size()) +
                   " and " + std::to_string(q.size()));
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative total for nearly equal inputs.
  return kl < 0.0 ? 0.0 : kl;
}

}  // namespace fairbound
