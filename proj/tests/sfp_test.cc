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

#include "repgame/sfp.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "repgame/errors.h"

namespace repgame::sfp {
namespace {

TEST(FormBeliefTest, EmpiricalFrequency) {
  const std::vector<int> history{1, 1, 0};
  const MixedStrategy b = FormBelief(history, 2);
  EXPECT_NEAR(b[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b[0], 1.0 / 3.0, 1e-15);
}

TEST(FormBeliefTest, EmptyHistoryIsUniform) {
  const MixedStrategy b = FormBelief({}, 3);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(b[i], 1.0 / 3.0);
}

TEST(FormBeliefTest, SingleObservedAction) {
  const std::vector<int> history(5, 0);
  const MixedStrategy b = FormBelief(history, 2);
  EXPECT_EQ(b[0], 1.0);
  EXPECT_EQ(b[1], 0.0);
}

TEST(FormBeliefTest, RejectsOutOfRangeIndex) {
  const std::vector<int> history{0, 2};
  EXPECT_THROW(FormBelief(history, 2), InvalidArgument);
  EXPECT_THROW(FormBelief({}, 0), InvalidArgument);
}

TEST(FormBeliefTest, AlwaysAValidMixedStrategy) {
  Rng rng = MakeRng({11});
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<int> history(rng() % 40);
    for (int& a : history) a = static_cast<int>(rng() % n);
    const MixedStrategy b = FormBelief(history, n);
    const auto& p = b.probabilities();
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double x : p) EXPECT_GE(x, 0.0);
  }
}

TEST(MixedStrategyTest, RejectsInvalidVectors) {
  EXPECT_THROW(MixedStrategy({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(MixedStrategy({-0.1, 1.1}), InvalidArgument);
}

TEST(PerturbedBestResponseTest, UnperturbedArgmax) {
  const std::vector<double> expected{0.2, 0.9};
  const std::vector<double> noise{5.0, -5.0};
  EXPECT_EQ(PerturbedArgmax(expected, 0.0, noise), 1);
}

TEST(PerturbedBestResponseTest, NoiseBreaksTie) {
  const std::vector<double> expected{0.5, 0.5};
  const std::vector<double> noise{0.1, 0.3};
  EXPECT_EQ(PerturbedArgmax(expected, 1.0, noise), 1);
}

TEST(PerturbedBestResponseTest, ExactTieGoesToSmallestIndex) {
  const std::vector<double> expected{0.5, 0.5, 0.5};
  const std::vector<double> noise{0.0, 0.0, 0.0};
  EXPECT_EQ(PerturbedArgmax(expected, 1.0, noise), 0);
}

TEST(PerturbedBestResponseTest, MatchingPenniesPureResponse) {
  const NormalFormGame game = NormalFormGame::MatchingPennies();
  const MixedStrategy heads({1.0, 0.0});
  const std::vector<double> noise{0.0, 0.0};
  const int a = PerturbedBestResponse(game, heads, 0.0, noise);
  EXPECT_EQ(game.r1(a, 0), 1.0);
}

TEST(PerturbedBestResponseTest, DimensionMismatchThrows) {
  const NormalFormGame game = NormalFormGame::MatchingPennies();
  const std::vector<double> noise{0.0};
  EXPECT_THROW(PerturbedBestResponse(game, MixedStrategy::Uniform(2), 1.0, noise),
               InvalidArgument);
  EXPECT_THROW(PerturbedBestResponse(game, MixedStrategy::Uniform(3), 1.0, {}),
               InvalidArgument);
}

TEST(PerturbedBestResponseTest, ShiftInvariance) {
  Rng rng = MakeRng({5});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> expected(4), shifted(4);
    for (double& x : expected) x = Uniform01(rng);
    const double c = Uniform01(rng) * 10.0 - 5.0;
    for (int i = 0; i < 4; ++i) shifted[i] = expected[i] + c;
    const auto noise = DrawNoiseVector(NoiseKind::kGaussian, 4, rng);
    const double eta = Uniform01(rng);
    EXPECT_EQ(PerturbedArgmax(expected, eta, noise), PerturbedArgmax(shifted, eta, noise));
  }
}

TEST(EtaScheduleTest, InverseSquareRoot) {
  EXPECT_DOUBLE_EQ(EtaSchedule(1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(EtaSchedule(4, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(EtaSchedule(100, 2.0), 0.2);
  EXPECT_THROW(EtaSchedule(0, 1.0), InvalidArgument);
  EXPECT_THROW(EtaSchedule(1, 0.0), InvalidArgument);
}

TEST(NormalFormGameTest, RejectsEntriesOutsideUnitInterval) {
  EXPECT_THROW(NormalFormGame({{1.5}}, {{0.0}}), InvalidArgument);
  EXPECT_THROW(NormalFormGame({{0.5, 0.5}}, {{0.0}}), InvalidArgument);
  EXPECT_THROW(NormalFormGame({}, {}), InvalidArgument);
}

TEST(NormalFormGameTest, JsonRoundTrip) {
  Rng rng = MakeRng({3});
  const NormalFormGame g = NormalFormGame::Random(3, 2, rng);
  const NormalFormGame back = GameFromJson(GameToJson(g));
  EXPECT_EQ(back.reward_1(), g.reward_1());
  EXPECT_EQ(back.reward_2(), g.reward_2());
}

TEST(RunSfpEpisodesTest, LearnsStrictBestResponseToStationaryOpponent) {
  // a1 strictly best against b0.
  const NormalFormGame game({{0.2, 0.8}, {0.9, 0.1}}, {{0.5, 0.5}, {0.5, 0.5}});
  const PlayTrace trace = RunSfpEpisodes(game, FixedSequence({0}), 1000, {}, 42);
  int a1 = 0;
  for (int t = 900; t < 1000; ++t) a1 += trace.records[t].action_1 == 1;
  EXPECT_GT(a1 / 100.0, 0.9);
}

TEST(RunSfpEpisodesTest, SingleEpisodeUsesUniformBeliefAndNoise) {
  // Uniform belief makes both rows of matching pennies worth 0.5, so the
  // action is the argmax of the first noise draw of the agent stream.
  const NormalFormGame game = NormalFormGame::MatchingPennies();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PlayTrace trace = RunSfpEpisodes(game, FixedSequence({0}), 1, {}, seed);
    ASSERT_EQ(trace.records.size(), 1u);
    Rng rng = MakeRng({seed, 1});
    const auto noise = DrawNoiseVector(NoiseKind::kGaussian, 2, rng);
    EXPECT_EQ(trace.records[0].action_1, noise[1] > noise[0] ? 1 : 0);
  }
}

TEST(RunSfpEpisodesTest, DeterministicGivenSeed) {
  Rng rng = MakeRng({1});
  const NormalFormGame game = NormalFormGame::Random(4, 4, rng);
  const auto opp = FixedSequence({0, 1, 2, 3, 3, 2});
  const PlayTrace a = RunSfpEpisodes(game, opp, 300, {}, 77);
  const PlayTrace b = RunSfpEpisodes(game, opp, 300, {}, 77);
  std::ostringstream sa, sb;
  WriteTraceCsv(a, sa);
  WriteTraceCsv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(RunSfpEpisodesTest, CumulativeRewardIsSumOfColumns) {
  Rng rng = MakeRng({2});
  const NormalFormGame game = NormalFormGame::Random(3, 3, rng);
  const PlayTrace trace = RunSfpEpisodes(game, RoundRobin(3), 50, {}, 1);
  ASSERT_EQ(trace.records.size(), 50u);
  std::vector<double> sum(3, 0.0);
  for (const auto& r : trace.records) {
    for (int a = 0; a < 3; ++a) sum[a] += game.r1(a, r.action_2);
  }
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(trace.cumulative_reward[a], sum[a], 1e-12);
}

TEST(ExternalRegretTest, MatchesRecomputationFromRecords) {
  Rng rng = MakeRng({4});
  const NormalFormGame game = NormalFormGame::Random(3, 3, rng);
  const PlayTrace trace = RunSfpEpisodes(game, RoundRobin(3), 200, {}, 3);
  std::vector<double> column(3, 0.0);
  double realized = 0.0;
  for (const auto& r : trace.records) {
    for (int a = 0; a < 3; ++a) column[a] += game.r1(a, r.action_2);
    realized += game.r1(r.action_1, r.action_2);
  }
  const double best = *std::max_element(column.begin(), column.end());
  EXPECT_NEAR(ExternalRegret(trace, game), best - realized, 1e-9);
  EXPECT_NEAR(trace.records.back().cumulative_regret, best - realized, 1e-9);
}

TEST(ExternalRegretTest, TwoEpisodesOfMissedReward) {
  const NormalFormGame game({{0.0}, {1.0}}, {{0.0}, {0.0}});
  PlayTrace trace;
  trace.records = {{0, 0, 0.0, 0.0}, {0, 0, 0.0, 0.0}};
  trace.cumulative_reward = {0.0, 2.0};
  EXPECT_DOUBLE_EQ(ExternalRegret(trace, game), 2.0);
  EXPECT_THROW(ExternalRegret(PlayTrace{}, game), InvalidArgument);
}

TEST(RegretPropertyTest, AverageRegretDecreasesAgainstStationaryOpponent) {
  double previous = 1e9;
  for (std::int64_t horizon : {100, 1000, 10000}) {
    double mean = 0.0;
    for (int s = 0; s < 20; ++s) {
      Rng rng = MakeRng({100, static_cast<std::uint64_t>(s)});
      const NormalFormGame game = NormalFormGame::Random(5, 5, rng);
      std::vector<double> w(5);
      double total = 0.0;
      for (double& x : w) total += (x = 0.05 + Uniform01(rng));
      for (double& x : w) x /= total;
      const PlayTrace trace =
          RunSfpEpisodes(game, Stationary(MixedStrategy(w)), horizon, {}, s + 1);
      mean += ExternalRegret(trace, game) / static_cast<double>(horizon) / 20.0;
    }
    EXPECT_LT(mean, previous) << "T=" << horizon;
    previous = mean;
  }
}

TEST(NoiseTest, LaplaceAndGumbelAreSelectable) {
  Rng rng = MakeRng({8});
  for (NoiseKind k : {NoiseKind::kGaussian, NoiseKind::kLaplace, NoiseKind::kGumbel}) {
    EXPECT_EQ(ParseNoiseKind(NoiseKindName(k)), k);
    EXPECT_TRUE(std::isfinite(DrawNoise(k, rng)));
  }
  EXPECT_THROW(ParseNoiseKind("cauchy"), InvalidArgument);
}

TEST(FTPLConfigTest, Validation) {
  FTPLConfig c;
  c.eta_scale = 0.0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c.eta_scale = 1.0;
  c.monte_carlo_draws = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(InducedDistributionTest, ConcentratesOnClearLeader) {
  const NormalFormGame game({{0.0}, {1.0}}, {{0.0}, {0.0}});
  FTPLConfig config;
  config.monte_carlo_draws = 2000;
  Rng rng = MakeRng({4});
  const MixedStrategy d =
      EstimateInducedDistribution(game, MixedStrategy::Uniform(1), 0.01, config, rng);
  EXPECT_GT(d[1], 0.99);
}

}  // namespace
}  // namespace repgame::sfp
