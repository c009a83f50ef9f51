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

// Feasible joint distributions over three binary variables (s, o, e) given an
// internal marginal p_i(s, o) and an external marginal p_e(o, e).
//
// The external marginal is always matched exactly. The internal marginal
// enters through its conditionals b(x) = p_i(s = 0 | o = x); when the two
// common marginals agree this is the same as matching p_i(s, o) itself, so a
// single solver serves both modes.
//
// Six independent linear constraints on eight unknowns leave two free
// parameters, c = p(0,0,0) and k = p(0,1,0). With P(x) = p_e(x,0) + p_e(x,1):
//
//   p(0,0,0) = c                 p(0,1,0) = k
//   p(1,0,0) = p_e(0,0) - c      p(1,1,0) = p_e(1,0) - k
//   p(0,0,1) = b(0) P(0) - c     p(0,1,1) = b(1) P(1) - k
//   p(1,0,1) = p_e(0,1) - p(0,0,1)
//   p(1,1,1) = p_e(1,1) - p(0,1,1)
//
// The standard parameter box is
//   c in [max(0, p_e(0,0) - 1, b(0) P(0) - 1), min(1, p_e(0,0), b(0) P(0))]
// and likewise for k with o = 1. Its lower bounds are not tight: grid points
// near them can make p(1,0,1) or p(1,1,1) negative, and Enumerate drops those
// points. The tight box also applies c >= b(0) P(0) - p_e(0,1), which makes it
// exactly the non-negativity region.

#ifndef FAIRBOUND_FEASIBLE_SET_H_
#define FAIRBOUND_FEASIBLE_SET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairbound/prob.h"

namespace fairbound {

enum class MarginalMode { kConsistent, kInconsistent };
enum class BoxPolicy { kStandard, kTight };

inline constexpr double kConsistencyTolerance = 1e-6;
inline constexpr double kResidualTolerance = 1e-9;

// True when p_i(o) and p_e(o) agree entrywise within `tolerance`.
bool CommonMarginalsAgree(const Marginal2& internal, const Marginal2& external,
                          double tolerance = kConsistencyTolerance);
MarginalMode DetectMode(const Marginal2& internal, const Marginal2& external);

struct FeasibleSpec {
  Marginal2 internal = Marginal2::Uniform(MarginalRole::kInternal);
  Marginal2 external = Marginal2::Uniform(MarginalRole::kExternal);
  MarginalMode mode = MarginalMode::kConsistent;
  int grid_resolution = 100;
  BoxPolicy box_policy = BoxPolicy::kStandard;

  // Checks roles, grid_resolution >= 2, and common-marginal agreement in
  // consistent mode. Throws InvalidArgument.
  void Validate() const;
};

struct FreeParamBox {
  double c_lo = 0.0;
  double c_hi = 0.0;
  double k_lo = 0.0;
  double k_hi = 0.0;
  bool empty = false;

  double c_width() const { return c_hi - c_lo; }
  double k_width() const { return k_hi - k_lo; }
  bool Contains(double c, double k) const {
    return !empty && c >= c_lo && c <= c_hi && k >= k_lo && k <= k_hi;
  }
};

// Box for (c, k) under the spec's box policy. Throws EmptyFeasibleSet when the
// box is empty and ZeroConditioningMass when p_i(o) has an empty cell.
FreeParamBox ParamBounds(const FeasibleSpec& spec);

// The eight closed-form entries for (c, k), without any validity check.
std::array<double, BinaryJoint3::kSize> ClosedFormJoint(const FeasibleSpec& spec,
                                                        double c, double k);

// Closed-form joint for (c, k). Throws OutOfBox outside ParamBounds and
// InfeasiblePoint when the point is inside the box but yields an entry below
// -1e-12 (possible only under the standard box).
BinaryJoint3 SolveJoint(const FeasibleSpec& spec, double c, double k);

struct FeasibleSet {
  FeasibleSpec spec;
  FreeParamBox box;
  std::vector<BinaryJoint3> joints;
  std::vector<std::pair<double, double>> params;  // (c, k) for each joint
  std::size_t n_grid_points = 0;  // candidates visited
  std::size_t n_dropped = 0;      // candidates rejected as infeasible

  std::size_t size() const { return joints.size(); }
};

// Inclusive linspace over each box axis, row-major in (c, k). An axis whose
// width is zero contributes a single point. Throws EmptyFeasibleSet when no
// grid point survives.
FeasibleSet Enumerate(const FeasibleSpec& spec);

struct ConstraintCheck {
  bool satisfied = false;
  std::vector<std::string> labels;
  std::vector<double> residuals;

  double max_abs_residual() const;
};

// Residuals of the constraints that apply in the spec's mode: four external
// cells always; four internal cells (consistent) or the four conditional
// equations plus normalisation (inconsistent).
ConstraintCheck VerifyConstraints(const BinaryJoint3& joint,
                                  const FeasibleSpec& spec,
                                  double tolerance = kResidualTolerance);

// Free parameters left by the marginal constraints for n_i internal, n_o
// common and n_e external binary variables. Throws Overflow when
// n_i + n_o + n_e > 62 and InvalidArgument on a zero count.
std::uint64_t CountFreeParams(int n_internal, int n_common, int n_external,
                              MarginalMode mode);

}  // namespace fairbound

#endif  // FAIRBOUND_FEASIBLE_SET_H_
