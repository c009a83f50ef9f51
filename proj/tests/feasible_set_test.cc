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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fairbound/feasible_set.h"
#include "fairbound/prob.h"
#include "fairbound/random.h"
#include "oracles.h"
#include "test_util.h"

namespace fairbound {
namespace {

using testutil::External;
using testutil::Internal;
using testutil::Joint;

// p_i(s, o) cells 2 s + o: p(0,0)=0.3, p(0,1)=0.1, p(1,0)=0.2, p(1,1)=0.4, so
// p_i(s=0 | o=0) = 0.6 and p_i(s=0 | o=1) = 0.2.
const std::array<double, 4> kWorkedInternal = {0.3, 0.1, 0.2, 0.4};

FeasibleSpec Spec(const std::array<double, 4>& in, const std::array<double, 4>& ex,
                  MarginalMode mode, int res = 100, BoxPolicy box = BoxPolicy::kStandard) {
  FeasibleSpec s;
  s.internal = Internal(in);
  s.external = External(ex);
  s.mode = mode;
  s.grid_resolution = res;
  s.box_policy = box;
  return s;
}

FeasibleSpec UniformSpec(int res = 100) {
  return Spec({0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kConsistent,
              res);
}

FeasibleSpec SpecFromTruth(const BinaryJoint3& g, MarginalMode mode, int res = 100) {
  return Spec(oracle::InternalOf(g.values()), oracle::ExternalOf(g.values()), mode, res);
}

TEST(ParamBounds, UniformMarginals) {
  const FreeParamBox box = ParamBounds(UniformSpec());
  EXPECT_DOUBLE_EQ(box.c_lo, 0.0);
  EXPECT_DOUBLE_EQ(box.c_hi, 0.25);
  EXPECT_DOUBLE_EQ(box.k_lo, 0.0);
  EXPECT_DOUBLE_EQ(box.k_hi, 0.25);
  EXPECT_FALSE(box.empty);
}

TEST(ParamBounds, WorkedInternalMarginal) {
  const FreeParamBox box = ParamBounds(
      Spec(kWorkedInternal, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kConsistent));
  // min(1, 0.25, 0.6 * 0.5) and min(1, 0.25, 0.2 * 0.5).
  EXPECT_NEAR(box.c_lo, 0.0, 1e-15);
  EXPECT_NEAR(box.c_hi, 0.25, 1e-15);
  EXPECT_NEAR(box.k_lo, 0.0, 1e-15);
  EXPECT_NEAR(box.k_hi, 0.1, 1e-15);
}

TEST(ParamBounds, ZeroInternalCommonMassThrows) {
  // p_i(o = 0) = 0: the conditional at o = 0 is undefined.
  EXPECT_FB_ERROR(ParamBounds(Spec({0.0, 0.5, 0.0, 0.5}, {1.0, 0.0, 0.0, 0.0},
                                   MarginalMode::kInconsistent)),
                  ErrorCode::kZeroConditioningMass);
}

TEST(ParamBounds, PointMassExternalInconsistent) {
  const FreeParamBox box = ParamBounds(
      Spec({0.4, 0.1, 0.4, 0.1}, {1.0, 0.0, 0.0, 0.0}, MarginalMode::kInconsistent));
  EXPECT_NEAR(box.c_hi, 0.5, 1e-15);
  EXPECT_EQ(box.k_hi, 0.0);
}

TEST(ParamBounds, BoxIsInsideUnitSquare) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto in = oracle::UniformSimplex<4>(rng);
    const auto ex = oracle::UniformSimplex<4>(rng);
    for (BoxPolicy policy : {BoxPolicy::kStandard, BoxPolicy::kTight}) {
      const FreeParamBox box =
          ParamBounds(Spec(in, ex, MarginalMode::kInconsistent, 100, policy));
      EXPECT_LE(0.0, box.c_lo);
      EXPECT_LE(box.c_lo, box.c_hi);
      EXPECT_LE(box.c_hi, 1.0);
      EXPECT_LE(0.0, box.k_lo);
      EXPECT_LE(box.k_lo, box.k_hi);
      EXPECT_LE(box.k_hi, 1.0);
    }
  }
}

TEST(ParamBounds, InconsistentAndConsistentRejections) {
  FeasibleSpec s = Spec(kWorkedInternal, {0.4, 0.2, 0.2, 0.2}, MarginalMode::kConsistent);
  EXPECT_FB_ERROR(ParamBounds(s), ErrorCode::kInvalidArgument);
  s = UniformSpec(1);
  EXPECT_FB_ERROR(ParamBounds(s), ErrorCode::kInvalidArgument);
}

TEST(SolveJoint, UniformCentre) {
  const BinaryJoint3 j = SolveJoint(UniformSpec(), 0.125, 0.125);
  for (double v : j.values()) EXPECT_NEAR(v, 0.125, 1e-15);
}

TEST(SolveJoint, WorkedExample) {
  const FeasibleSpec spec =
      Spec(kWorkedInternal, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kConsistent);
  const BinaryJoint3 j = SolveJoint(spec, 0.1, 0.05);
  const std::array<double, 8> expected = {0.1, 0.2, 0.05, 0.05, 0.15, 0.05, 0.2, 0.2};
  double total = 0;
  for (int i = 0; i < 8; ++i) {
    EXPECT_NEAR(j[i], expected[i], 1e-15) << i;
    total += j[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_LE(oracle::MaxResidual(j.values(), kWorkedInternal, {0.25, 0.25, 0.25, 0.25}, true),
            1e-15);
  EXPECT_TRUE(VerifyConstraints(j, spec).satisfied);
}

TEST(SolveJoint, UpperEndpointZeroesAnEntry) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const FeasibleSpec spec =
        SpecFromTruth(Joint(oracle::UniformSimplex<8>(rng)), MarginalMode::kConsistent);
    const FreeParamBox box = ParamBounds(spec);
    const auto p = ClosedFormJoint(spec, box.c_hi, box.k_lo + 0.5 * box.k_width());
    EXPECT_LE(*std::min_element(p.begin(), p.end()), 1e-12);
  }
}

TEST(SolveJoint, OutsideTheBox) {
  EXPECT_FB_ERROR(SolveJoint(UniformSpec(), 0.3, 0.1), ErrorCode::kOutOfBox);
  EXPECT_FB_ERROR(SolveJoint(UniformSpec(), 0.1, -0.01), ErrorCode::kOutOfBox);
}

TEST(SolveJoint, StandardBoxCornerCanBeInfeasible) {
  // p_e(0,1) small: c = 0 forces p(1,0,1) = p_e(0,1) - b(0) P(0) < 0.
  const FeasibleSpec spec =
      Spec({0.45, 0.05, 0.05, 0.45}, {0.45, 0.05, 0.05, 0.45}, MarginalMode::kConsistent);
  const FreeParamBox box = ParamBounds(spec);
  EXPECT_EQ(box.c_lo, 0.0);
  EXPECT_FB_ERROR(SolveJoint(spec, 0.0, box.k_hi), ErrorCode::kInfeasiblePoint);
}

TEST(SolveJoint, TightBoxCornersAreFeasibleAndTouchZero) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const auto in = oracle::UniformSimplex<4>(rng);
    const auto ex = oracle::UniformSimplex<4>(rng);
    const FeasibleSpec spec = Spec(in, ex, MarginalMode::kInconsistent, 100, BoxPolicy::kTight);
    const FreeParamBox box = ParamBounds(spec);
    for (double c : {box.c_lo, box.c_hi}) {
      for (double k : {box.k_lo, box.k_hi}) {
        const BinaryJoint3 j = SolveJoint(spec, c, k);
        EXPECT_LE(*std::min_element(j.values().begin(), j.values().end()), 1e-9);
      }
    }
  }
}

TEST(SolveJoint, StandardBoxCornersTouchZeroOrBelow) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    const FeasibleSpec spec =
        SpecFromTruth(Joint(oracle::UniformSimplex<8>(rng)), MarginalMode::kConsistent);
    const FreeParamBox box = ParamBounds(spec);
    for (double c : {box.c_lo, box.c_hi}) {
      for (double k : {box.k_lo, box.k_hi}) {
        const auto p = ClosedFormJoint(spec, c, k);
        EXPECT_LE(*std::min_element(p.begin(), p.end()), 1e-9);
      }
    }
  }
}

TEST(Enumerate, UniformResolutionTwoGivesCorners) {
  const FeasibleSet set = Enumerate(UniformSpec(2));
  ASSERT_EQ(set.size(), 4u);
  const std::vector<std::pair<double, double>> expected = {
      {0.0, 0.0}, {0.0, 0.25}, {0.25, 0.0}, {0.25, 0.25}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(set.params[i].first, expected[i].first);
    EXPECT_DOUBLE_EQ(set.params[i].second, expected[i].second);
  }
}

TEST(Enumerate, InteriorBoxYieldsFullGrid) {
  const FeasibleSet set = Enumerate(UniformSpec());
  EXPECT_EQ(set.size(), 10000u);
  EXPECT_EQ(set.n_grid_points, 10000u);
  EXPECT_EQ(set.n_dropped, 0u);
}

TEST(Enumerate, GridIsRowMajorAndInclusive) {
  const FeasibleSet set =
      Enumerate(Spec(kWorkedInternal, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kConsistent, 5));
  // c = 0 leaves p(1,0,1) = 0.25 - 0.3 < 0, so the first column drops.
  EXPECT_EQ(set.n_grid_points, 25u);
  EXPECT_EQ(set.n_dropped, 5u);
  ASSERT_EQ(set.size(), 20u);
  EXPECT_EQ(set.params.front().first, 0.0625);
  EXPECT_EQ(set.params.back().first, 0.25);
  EXPECT_EQ(set.params.back().second, 0.1);
  EXPECT_EQ(set.params[1].first, 0.0625);
  EXPECT_NEAR(set.params[1].second, 0.025, 1e-15);
}

TEST(Enumerate, DegenerateAxisContributesOnePoint) {
  // p_e(0,0) = 0 pins c to zero.
  const FeasibleSet set =
      Enumerate(Spec({0.2, 0.3, 0.3, 0.2}, {0.0, 0.5, 0.25, 0.25}, MarginalMode::kConsistent));
  EXPECT_EQ(set.box.c_width(), 0.0);
  EXPECT_EQ(set.n_grid_points, 100u);
  EXPECT_LE(set.size(), 100u);
}

TEST(Enumerate, SoundnessAgainstIndependentResiduals) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const BinaryJoint3 g = Joint(oracle::UniformSimplex<8>(rng));
    const auto in = oracle::InternalOf(g.values());
    const auto ex = oracle::ExternalOf(g.values());
    for (bool consistent : {true, false}) {
      auto in_used = in;
      if (!consistent) {
        // Distort the o = 0 slice.
        in_used[0] *= 2.0;
        in_used[2] *= 2.0;
        const double z = in_used[0] + in_used[1] + in_used[2] + in_used[3];
        for (double& v : in_used) v /= z;
      }
      const FeasibleSet set = Enumerate(
          Spec(in_used, ex, consistent ? MarginalMode::kConsistent : MarginalMode::kInconsistent,
               30));
      EXPECT_LE(set.size(), 900u);
      for (const BinaryJoint3& j : set.joints) {
        EXPECT_LE(oracle::MaxResidual(j.values(), in_used, ex, consistent), 1e-9);
        EXPECT_TRUE(VerifyConstraints(j, set.spec).satisfied);
      }
    }
  }
}

TEST(Enumerate, ConsistentRoundTripFindsTruth) {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto p = SampleDirichlet(8, 1.0, RngSeed{1000 + t});
    std::array<double, 8> a{};
    std::copy(p.begin(), p.end(), a.begin());
    const BinaryJoint3 g = Joint(a);
    const FeasibleSet set = Enumerate(SpecFromTruth(g, MarginalMode::kConsistent));
    const double c = g(0, 0, 0);
    const double k = g(0, 1, 0);
    ASSERT_TRUE(set.box.Contains(c, k));
    const double spacing = std::max(set.box.c_width(), set.box.k_width()) / 99.0;
    double best = 1e9;
    double best_joint = 1e9;
    for (std::size_t i = 0; i < set.size(); ++i) {
      best = std::min(best, std::max(std::abs(set.params[i].first - c),
                                     std::abs(set.params[i].second - k)));
      double d = 0;
      for (int x = 0; x < 8; ++x) d = std::max(d, std::abs(set.joints[i][x] - g[x]));
      best_joint = std::min(best_joint, d);
    }
    EXPECT_LE(best, spacing + 1e-12);
    EXPECT_LE(best_joint, spacing + 1e-12);
  }
}

TEST(Enumerate, EmptyWhenCommonMarginalsAgreeOnlyLoosely) {
  // Agreement within 1e-6 passes the consistency check, but no joint can meet
  // both marginals to 1e-9.
  const FeasibleSpec spec = Spec({0.25, 0.25, 0.25, 0.25},
                                 {0.2500004, 0.25, 0.2499996, 0.25}, MarginalMode::kConsistent);
  EXPECT_FB_ERROR(Enumerate(spec), ErrorCode::kEmptyFeasibleSet);
}

TEST(VerifyConstraints, UniformJointAgainstSkewedInternal) {
  const FeasibleSpec spec =
      Spec({0.4, 0.1, 0.1, 0.4}, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kConsistent);
  const ConstraintCheck check = VerifyConstraints(BinaryJoint3::Uniform(), spec);
  EXPECT_FALSE(check.satisfied);
  ASSERT_EQ(check.labels.size(), check.residuals.size());
  ASSERT_EQ(check.residuals.size(), 8u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(check.residuals[i], 0.0, 1e-15);
  EXPECT_NEAR(check.residuals[4], 0.25 - 0.4, 1e-15);
  EXPECT_NEAR(check.residuals[5], 0.25 - 0.1, 1e-15);
  EXPECT_NEAR(check.max_abs_residual(), 0.15, 1e-15);
}

TEST(VerifyConstraints, TruthAgainstItsOwnMarginals) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const BinaryJoint3 g = Joint(oracle::UniformSimplex<8>(rng));
    EXPECT_TRUE(VerifyConstraints(g, SpecFromTruth(g, MarginalMode::kConsistent)).satisfied);
    EXPECT_TRUE(VerifyConstraints(g, SpecFromTruth(g, MarginalMode::kInconsistent)).satisfied);
  }
}

TEST(VerifyConstraints, InconsistentModeHasNineResiduals) {
  const FeasibleSpec spec =
      Spec(kWorkedInternal, {0.25, 0.25, 0.25, 0.25}, MarginalMode::kInconsistent);
  const ConstraintCheck check = VerifyConstraints(BinaryJoint3::Uniform(), spec);
  EXPECT_EQ(check.residuals.size(), 9u);
  EXPECT_EQ(check.labels.back(), "normalisation");
  EXPECT_FALSE(check.satisfied);
}

TEST(CountFreeParams, PublishedValues) {
  EXPECT_EQ(CountFreeParams(1, 1, 1, MarginalMode::kConsistent), 2u);
  EXPECT_EQ(CountFreeParams(1, 1, 1, MarginalMode::kInconsistent), 2u);
  EXPECT_EQ(CountFreeParams(2, 1, 2, MarginalMode::kInconsistent), 18u);
}

TEST(CountFreeParams, InconsistentFormulaMatchesConstraintRank) {
  for (int ni = 1; ni <= 3; ++ni) {
    for (int no = 1; no <= 3; ++no) {
      for (int ne = 1; ne <= 3; ++ne) {
        if (ni + no + ne > 8) continue;
        EXPECT_EQ(static_cast<int>(CountFreeParams(ni, no, ne, MarginalMode::kInconsistent)),
                  oracle::FreeParamsByRank(ni, no, ne, false))
            << ni << no << ne;
      }
    }
  }
}

TEST(CountFreeParams, ConsistentFormulaMatchesRankWithOneCommonVariable) {
  for (int ni = 1; ni <= 3; ++ni) {
    for (int ne = 1; ne <= 3; ++ne) {
      EXPECT_EQ(static_cast<int>(CountFreeParams(ni, 1, ne, MarginalMode::kConsistent)),
                oracle::FreeParamsByRank(ni, 1, ne, true));
    }
  }
}

TEST(CountFreeParams, ConsistentFormulaWithSeveralCommonVariables) {
  // The closed form subtracts one redundant constraint per marginal. With more
  // than one common variable the two marginals also share the common
  // marginal, which leaves 2^n_o - 2 further redundant equations; the rank
  // count is larger by exactly that.
  for (int no = 2; no <= 3; ++no) {
    const int formula = static_cast<int>(CountFreeParams(1, no, 1, MarginalMode::kConsistent));
    EXPECT_EQ(formula, (1 << (2 + no)) - 2 * (1 << (1 + no)) + 2);
    EXPECT_EQ(oracle::FreeParamsByRank(1, no, 1, true), formula + (1 << no) - 2);
  }
}

TEST(CountFreeParams, Guards) {
  EXPECT_FB_ERROR(CountFreeParams(30, 3, 30, MarginalMode::kConsistent), ErrorCode::kOverflow);
  EXPECT_FB_ERROR(CountFreeParams(0, 1, 1, MarginalMode::kConsistent),
                  ErrorCode::kInvalidArgument);
  EXPECT_EQ(CountFreeParams(20, 2, 40, MarginalMode::kInconsistent),
            (std::uint64_t{1} << 62) - (std::uint64_t{1} << 42) - (std::uint64_t{1} << 22) +
                (std::uint64_t{1} << 2));
}

TEST(DetectMode, Tolerance) {
  EXPECT_EQ(DetectMode(Internal({0.25, 0.25, 0.25, 0.25}),
                       External({0.2500004, 0.25, 0.2499996, 0.25})),
            MarginalMode::kConsistent);
  EXPECT_EQ(DetectMode(Internal({0.25, 0.25, 0.25, 0.25}), External({0.3, 0.25, 0.2, 0.25})),
            MarginalMode::kInconsistent);
}

}  // namespace
}  // namespace fairbound
