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

#include "fairbound/feasible_set.h"

#include <algorithm>
#include <cmath>

#include "fairbound/error.h"

namespace fairbound {
namespace {

// Widths at or below this are treated as a single point.
constexpr double kDegenerateWidth = 1e-15;

struct SolverInputs {
  double pe00, pe01, pe10, pe11;  // p_e(o, e)
  double b0, b1;                  // p_i(s = 0 | o)
};

SolverInputs Inputs(const FeasibleSpec& spec) {
  const ConditionalTable2 cond = ConditionCommon(spec.internal);
  const Marginal2& pe = spec.external;
  return {pe(0, 0), pe(0, 1), pe(1, 0), pe(1, 1), cond(0, 0), cond(0, 1)};
}

std::array<double, BinaryJoint3::kSize> Closed(const SolverInputs& in, double c,
                                               double k) {
  std::array<double, BinaryJoint3::kSize> p{};
  const double p001 = in.b0 * (in.pe00 + in.pe01) - c;
  const double p011 = in.b1 * (in.pe10 + in.pe11) - k;
  p[BinaryJoint3::Index(0, 0, 0)] = c;
  p[BinaryJoint3::Index(0, 1, 0)] = k;
  p[BinaryJoint3::Index(1, 0, 0)] = in.pe00 - c;
  p[BinaryJoint3::Index(1, 1, 0)] = in.pe10 - k;
  p[BinaryJoint3::Index(0, 0, 1)] = p001;
  p[BinaryJoint3::Index(1, 0, 1)] = in.pe01 - p001;
  p[BinaryJoint3::Index(0, 1, 1)] = p011;
  p[BinaryJoint3::Index(1, 1, 1)] = in.pe11 - p011;
  return p;
}

// Fills `out` with residuals and returns how many were written.
std::size_t Residuals(const BinaryJoint3& j, const FeasibleSpec& spec,
                      std::array<double, 9>& out) {
  std::size_t n = 0;
  for (int o = 0; o < 2; ++o) {
    for (int e = 0; e < 2; ++e) {
      out[n++] = j(0, o, e) + j(1, o, e) - spec.external(o, e);
    }
  }
  if (spec.mode == MarginalMode::kConsistent) {
    for (int s = 0; s < 2; ++s) {
      for (int o = 0; o < 2; ++o) {
        out[n++] = j(s, o, 0) + j(s, o, 1) - spec.internal(s, o);
      }
    }
  } else {
    const ConditionalTable2 cond = ConditionCommon(spec.internal);
    for (int s = 0; s < 2; ++s) {
      for (int o = 0; o < 2; ++o) {
        const double column = j(0, o, 0) + j(0, o, 1) + j(1, o, 0) + j(1, o, 1);
        out[n++] = column * cond(s, o) - (j(s, o, 0) + j(s, o, 1));
      }
    }
    double total = 0.0;
    for (double x : j.values()) total += x;
    out[n++] = total - 1.0;
  }
  return n;
}

bool ResidualsWithin(const BinaryJoint3& j, const FeasibleSpec& spec,
                     double tolerance) {
  std::array<double, 9> r;
  const std::size_t n = Residuals(j, spec, r);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(r[i]) <= tolerance)) return false;
  }
  return true;
}

std::vector<double> Linspace(double lo, double hi, int n) {
  if (hi - lo <= kDegenerateWidth) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + i * step;
  // Pin the endpoint so boundary points are reproduced exactly.
  out.back() = hi;
  return out;
}

}  // namespace

bool CommonMarginalsAgree(const Marginal2& internal, const Marginal2& external,
                          double tolerance) {
  const auto a = CommonMarginal(internal);
  const auto b = CommonMarginal(external);
  return std::abs(a[0] - b[0]) <= tolerance && std::abs(a[1] - b[1]) <= tolerance;
}

MarginalMode DetectMode(const Marginal2& internal, const Marginal2& external) {
  return CommonMarginalsAgree(internal, external) ? MarginalMode::kConsistent
                                                  : MarginalMode::kInconsistent;
}

void FeasibleSpec::Validate() const {
  if (internal.role() != MarginalRole::kInternal ||
      external.role() != MarginalRole::kExternal) {
    ThrowError(ErrorCode::kInvalidArgument,
               "feasible spec needs an internal (s, o) and an external (o, e) "
               "marginal");
  }
  if (grid_resolution < 2) {
    ThrowError(ErrorCode::kInvalidArgument, "grid_resolution must be >= 2");
  }
  if (mode == MarginalMode::kConsistent &&
      !CommonMarginalsAgree(internal, external)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "consistent mode requires p_i(o) = p_e(o) within 1e-6");
  }
}

FreeParamBox ParamBounds(const FeasibleSpec& spec) {
  spec.Validate();
  const SolverInputs in = Inputs(spec);
  const double c_target = in.b0 * (in.pe00 + in.pe01);
  const double k_target = in.b1 * (in.pe10 + in.pe11);

  FreeParamBox box;
  box.c_lo = std::max({0.0, in.pe00 - 1.0, c_target - 1.0});
  box.c_hi = std::min({1.0, in.pe00, c_target});
  box.k_lo = std::max({0.0, in.pe10 - 1.0, k_target - 1.0});
  box.k_hi = std::min({1.0, in.pe10, k_target});
  if (spec.box_policy == BoxPolicy::kTight) {
    box.c_lo = std::max(box.c_lo, c_target - in.pe01);
    box.k_lo = std::max(box.k_lo, k_target - in.pe11);
  }

  // Rounding can cross the bounds of a zero-width box by an ulp or two.
  const auto settle = [](double& lo, double& hi) {
    if (lo > hi && lo - hi <= 1e-12) hi = lo;
  };
  settle(box.c_lo, box.c_hi);
  settle(box.k_lo, box.k_hi);
  if (box.c_lo > box.c_hi || box.k_lo > box.k_hi) {
    box.empty = true;
    ThrowError(ErrorCode::kEmptyFeasibleSet,
               "no (c, k) satisfies the parameter bounds");
  }
  return box;
}

std::array<double, BinaryJoint3::kSize> ClosedFormJoint(const FeasibleSpec& spec,
                                                        double c, double k) {
  return Closed(Inputs(spec), c, k);
}

BinaryJoint3 SolveJoint(const FeasibleSpec& spec, double c, double k) {
  const FreeParamBox box = ParamBounds(spec);
  if (!box.Contains(c, k)) {
    ThrowError(ErrorCode::kOutOfBox, "(c, k) = (" + std::to_string(c) + ", " +
                                         std::to_string(k) +
                                         ") lies outside the parameter box");
  }
  const auto p = ClosedFormJoint(spec, c, k);
  if (!BinaryJoint3::IsAdmissible(p)) {
    ThrowError(ErrorCode::kInfeasiblePoint,
               "(c, k) inside the box yields a negative joint entry");
  }
  return BinaryJoint3::FromProbabilities(p);
}

FeasibleSet Enumerate(const FeasibleSpec& spec) {
  FeasibleSet set;
  set.spec = spec;
  set.box = ParamBounds(spec);
  const SolverInputs in = Inputs(spec);
  const std::vector<double> cs =
      Linspace(set.box.c_lo, set.box.c_hi, spec.grid_resolution);
  const std::vector<double> ks =
      Linspace(set.box.k_lo, set.box.k_hi, spec.grid_resolution);
  set.n_grid_points = cs.size() * ks.size();
  set.joints.reserve(set.n_grid_points);
  set.params.reserve(set.n_grid_points);
  // The closed forms satisfy the inconsistent-mode equations identically, so
  // only consistent mode (matching p_i(s, o) cell by cell) needs a residual
  // check on top of non-negativity.
  const bool check_residuals = spec.mode == MarginalMode::kConsistent;
  for (double c : cs) {
    for (double k : ks) {
      const auto p = Closed(in, c, k);
      if (!BinaryJoint3::IsAdmissible(p)) {
        ++set.n_dropped;
        continue;
      }
      BinaryJoint3 joint = BinaryJoint3::FromProbabilities(p);
      if (check_residuals && !ResidualsWithin(joint, spec, kResidualTolerance)) {
        ++set.n_dropped;
        continue;
      }
      set.joints.push_back(joint);
      set.params.emplace_back(c, k);
    }
  }
  // Happens when the grid misses a thin non-negative region, or when the
  // common marginals agree only to within the consistency tolerance.
  if (set.joints.empty()) {
    ThrowError(ErrorCode::kEmptyFeasibleSet,
               "all " + std::to_string(set.n_grid_points) + " grid points were infeasible");
  }
  return set;
}

double ConstraintCheck::max_abs_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

ConstraintCheck VerifyConstraints(const BinaryJoint3& joint,
                                  const FeasibleSpec& spec, double tolerance) {
  static const char* const kExternal[] = {"external(0,0)", "external(0,1)",
                                          "external(1,0)", "external(1,1)"};
  static const char* const kInternal[] = {"internal(0,0)", "internal(0,1)",
                                          "internal(1,0)", "internal(1,1)"};
  static const char* const kConditional[] = {
      "conditional(s=0|o=0)", "conditional(s=0|o=1)", "conditional(s=1|o=0)",
      "conditional(s=1|o=1)", "normalisation"};
  ConstraintCheck check;
  std::array<double, 9> r;
  const std::size_t n = Residuals(joint, spec, r);
  check.residuals.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n));
  check.labels.assign(std::begin(kExternal), std::end(kExternal));
  if (spec.mode == MarginalMode::kConsistent) {
    check.labels.insert(check.labels.end(), std::begin(kInternal),
                        std::end(kInternal));
  } else {
    check.labels.insert(check.labels.end(), std::begin(kConditional),
                        std::end(kConditional));
  }
  check.satisfied = check.max_abs_residual() <= tolerance;
  return check;
}

std::uint64_t CountFreeParams(int n_internal, int n_common, int n_external,
                              MarginalMode mode) {
  if (n_internal < 1 || n_common < 1 || n_external < 1) {
    ThrowError(ErrorCode::kInvalidArgument, "variable counts must be >= 1");
  }
  const int n = n_internal + n_common + n_external;
  if (n > 62) {
    ThrowError(ErrorCode::kOverflow, "more than 62 binary variables");
  }
  const auto pow2 = [](int x) { return std::int64_t{1} << x; };
  std::int64_t count = pow2(n) - pow2(n_internal + n_common) -
                       pow2(n_common + n_external);
  count += mode == MarginalMode::kConsistent ? 2 : pow2(n_common);
  return static_cast<std::uint64_t>(count);
}

}  // namespace fairbound
