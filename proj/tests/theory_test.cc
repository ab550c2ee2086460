// Copyright 2026 The Repgame Authors
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

#include "repgame/theory.h"

#include <gtest/gtest.h>

#include "repgame/errors.h"
#include "repgame/rng.h"

namespace repgame {
namespace {

TheorySettings Small() {
  TheorySettings s;
  s.theorem1_instances = 12;
  s.prop1_instances = 8;
  s.pi_instances = 6;
  s.ftpl_seeds = 4;
  s.ftpl_horizons = {50, 400};
  return s;
}

TEST(RandomSmallSpecTest, RespectsLimitsAndUnitRange) {
  Rng rng = MakeRng({1});
  const AbstractionLimits limits;
  for (int i = 0; i < 50; ++i) {
    const GameSpec spec = RandomSmallSpec(rng, limits, 3);
    EXPECT_NO_THROW(spec.Validate());
    EXPECT_LE(spec.horizon, limits.max_horizon);
    EXPECT_LE(static_cast<int>(spec.price_grid.size()), limits.max_grid);
    EXPECT_LE(spec.alphabet_size(), limits.max_alphabet);
    for (double p : spec.price_grid) {
      EXPECT_GE(p, spec.production_cost);
      EXPECT_LE(p, spec.budget);
    }
    EXPECT_LE(EstimateTreeSize(spec, 3), static_cast<double>(limits.max_tree));
  }
}

TEST(SweepTest, Theorem1HoldsOnSmallSweep) {
  const auto reports = SweepTheorem1(Small());
  ASSERT_EQ(reports.size(), 12u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.instance_id;
    EXPECT_TRUE(r.corollary_pass) << r.instance_id;
    for (const auto& row : r.rows) EXPECT_GE(row.slack, -1e-9);
    for (double e : r.epsilon) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 1.0);
    }
  }
}

TEST(SweepTest, Prop1HoldsOnSmallSweep) {
  const auto reports = SweepProp1(Small());
  ASSERT_EQ(reports.size(), 8u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.instance_id;
    EXPECT_LE(r.j_policy, r.bound + 1e-9);
    EXPECT_NEAR(r.best_response, r.r1_max, 1e-9);
  }
}

TEST(SweepTest, PolicyImprovementOnSmallSweep) {
  const auto reports = SweepPolicyImprovement(Small());
  ASSERT_EQ(reports.size(), 6u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.instance_id;
    ASSERT_FALSE(r.sharpened.empty());
    EXPECT_GE(r.sharpened[0] + 1e-9, r.base_value);
  }
}

TEST(SweepTest, RegretRateOnSmallSweep) {
  const RegretRateReport r = SweepRegretRate(Small(), {});
  EXPECT_EQ(r.cells.size(), 4u);
  EXPECT_TRUE(r.decreasing_pass);
  EXPECT_TRUE(r.pass);
}

TEST(SweepTest, Deterministic) {
  const auto a = SweepProp1(Small());
  const auto b = SweepProp1(Small());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(Dump(ToJson(a[i])), Dump(ToJson(b[i])));
  }
}

TEST(CheckR1MaxTest, AllCasesPass) {
  const auto cases = CheckR1Max();
  ASSERT_EQ(cases.size(), 2u);
  for (const auto& c : cases) EXPECT_TRUE(c.pass) << c.name;
  EXPECT_DOUBLE_EQ(cases[1].primary.value, 12.0);
}

TEST(TheorySettingsTest, RoundTripAndValidation) {
  TheorySettings s = Small();
  EXPECT_EQ(TheorySettingsFromJson(ToJson(s)), s);
  s.ftpl_horizons = {100, 50};
  EXPECT_THROW(s.Validate(), ConfigError);
  s = Small();
  s.ftpl_rate_constant = 0.0;
  EXPECT_THROW(s.Validate(), ConfigError);
  EXPECT_THROW(TheorySettingsFromJson(Json{{"sed", 1}}), ConfigError);
}

}  // namespace
}  // namespace repgame
