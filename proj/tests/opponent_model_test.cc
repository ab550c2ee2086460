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

#include "repgame/opponent_model.h"

#include <gtest/gtest.h>

#include <cmath>

#include "repgame/errors.h"
#include "repgame/persona.h"
#include "repgame/rng.h"

namespace repgame {
namespace {

double ProbOf(const ActionDistribution& dist, const Action& a) {
  double p = 0.0;
  for (const auto& w : dist) p += w.action == a ? w.prob : 0.0;
  return p;
}

// Plays one episode between two providers and appends it to `context`.
EpisodeState PlayEpisode(const GameSpec& spec, PolicyProvider& p1, PolicyProvider& p2,
                         Context& context, Rng& rng) {
  EpisodeState s;
  const int episode = static_cast<int>(context.size()) + 1;
  while (!s.terminal()) {
    const DecisionPoint point = PointFor(spec, context, s, episode);
    PolicyProvider& mover = point.agent == Agent::kOne ? p1 : p2;
    s = ApplyAction(s, spec, mover.Act(point, rng));
  }
  context.Append(s, EpisodeRewards(s, spec));
  return s;
}

TEST(OpponentModelTest, EmpiricalFrequency) {
  const GameSpec spec = GameSpec::BuyerSeller();
  BucketConfig config;
  config.optimism = false;
  OpponentModel model(spec, Agent::kTwo, config);
  const EpisodeState s = ApplyAction({}, spec, Action::Offer(50, 0));
  for (int i = 0; i < 4; ++i) model.Observe(s, Action::Offer(55, 1));
  model.Observe(s, Action::Reject(0));
  const ActionDistribution dist = model.Predict(s);
  EXPECT_DOUBLE_EQ(ProbOf(dist, Action::Offer(55, 1)), 0.8);
  EXPECT_DOUBLE_EQ(ProbOf(dist, Action::Reject(0)), 0.2);
  EXPECT_EQ(model.Visits(MakeBucketKey(spec, s, Agent::kTwo, config)), 5);
}

TEST(OpponentModelTest, SmoothingSpreadsOverLegalActions) {
  const GameSpec spec = GameSpec::BuyerSeller();
  BucketConfig config;
  config.smoothing = 1.0;
  OpponentModel model(spec, Agent::kTwo, config);
  const EpisodeState s = ApplyAction({}, spec, Action::Offer(50, 0));
  model.Observe(s, Action::Reject(0));
  const auto legal = LegalActions(s, spec);
  const ActionDistribution dist = model.Predict(s);
  const double n = static_cast<double>(legal.size());
  EXPECT_NEAR(ProbOf(dist, Action::Reject(0)), 2.0 / (n + 1.0), 1e-12);
  EXPECT_NEAR(ProbOf(dist, Action::Accept(0)), 1.0 / (n + 1.0), 1e-12);
}

TEST(OpponentModelTest, OptimismAcceptsFavourableOffer) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const OpponentModel model(spec, Agent::kTwo, {});
  // Seller offers 58: 15 for agent 1.
  const EpisodeState s = ApplyAction({}, spec, Action::Offer(58, 0));
  const ActionDistribution dist = model.Predict(s);
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist[0].action.kind, ProposalKind::kAccept);
  EXPECT_EQ(OptimisticResponse(spec, s, Agent::kTwo).kind, ProposalKind::kAccept);
}

TEST(OpponentModelTest, OptimismWithoutStandingOfferProposesBestDeal) {
  GameSpec spec = GameSpec::BuyerSeller();
  spec.starter = Agent::kTwo;
  const Action a = OptimisticResponse(spec, EpisodeState{}, Agent::kTwo);
  ASSERT_EQ(a.kind, ProposalKind::kOffer);
  EXPECT_EQ(DealReward(spec, Agent::kOne, a.payload), 57.0);
}

TEST(OpponentModelTest, NoOptimismIsUniform) {
  const GameSpec spec = GameSpec::BuyerSeller();
  BucketConfig config;
  config.optimism = false;
  const OpponentModel model(spec, Agent::kTwo, config);
  const EpisodeState s = ApplyAction({}, spec, Action::Offer(50, 0));
  const auto legal = LegalActions(s, spec);
  const ActionDistribution dist = model.Predict(s);
  ASSERT_EQ(dist.size(), legal.size());
  for (const auto& w : dist) EXPECT_NEAR(w.prob, 1.0 / legal.size(), 1e-12);
}

TEST(OpponentModelTest, OffTurnThrows) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const OpponentModel model(spec, Agent::kTwo, {});
  EXPECT_THROW(model.Predict(EpisodeState{}), ProtocolError);
}

TEST(BucketConfigTest, Validation) {
  BucketConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.payload_buckets = -1;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = {};
  c.smoothing = -0.5;
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(FitOpponentModelTest, DeterministicOpponentIsReproducedOnVisitedKeys) {
  const GameSpec spec = GameSpec::BuyerSeller();
  Persona planner(PersonaParams::Defaults(PersonaFamily::kDesperate));
  Persona scripted(PersonaParams::Defaults(PersonaFamily::kCunning));
  Context context;
  Rng rng = MakeRng({5});
  for (int t = 0; t < 10; ++t) PlayEpisode(spec, planner, scripted, context, rng);
  BucketConfig config;
  config.payload_buckets = 0;
  const OpponentModel model = FitOpponentModel(spec, context, {}, Agent::kTwo, config);
  EXPECT_GT(model.total_observations(), 0);
  for (const EpisodeRecord& e : context.episodes()) {
    EpisodeState s;
    for (const Turn& turn : e.turns) {
      if (turn.agent == Agent::kTwo) {
        const auto dist = model.Predict(s);
        EXPECT_DOUBLE_EQ(ProbOf(dist, turn.action), 1.0);
      }
      s = ApplyAction(s, spec, turn.action);
    }
  }
}

TEST(FitOpponentModelTest, EmptyContextFallsBackEverywhere) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const OpponentModel model = FitOpponentModel(spec, {}, {}, Agent::kTwo);
  EXPECT_EQ(model.total_observations(), 0);
  EXPECT_TRUE(model.counts().empty());
}

TEST(FitOpponentModelTest, PureIdempotentAndMonotone) {
  const GameSpec spec = GameSpec::BuyerSeller();
  Persona a(PersonaParams::Defaults(PersonaFamily::kBrainstormMix));
  Persona b(PersonaParams::Defaults(PersonaFamily::kEmotional));
  Context context;
  Rng rng = MakeRng({6});
  std::int64_t previous = 0;
  for (int t = 0; t < 8; ++t) {
    PlayEpisode(spec, a, b, context, rng);
    const OpponentModel m1 = FitOpponentModel(spec, context, {}, Agent::kTwo);
    const OpponentModel m2 = FitOpponentModel(spec, context, {}, Agent::kTwo);
    EXPECT_EQ(m1, m2);
    EXPECT_GE(m1.total_observations(), previous);
    previous = m1.total_observations();
  }
  // The partial trajectory also counts.
  const EpisodeState s =
      ApplyAction(ApplyAction({}, spec, Action::Offer(60, 0)), spec, Action::Offer(50, 1));
  const OpponentModel with_partial =
      FitOpponentModel(spec, context, s.trajectory, Agent::kTwo);
  EXPECT_EQ(with_partial.total_observations(), previous + 1);
}

TEST(FitOpponentModelTest, StochasticFrequencyConverges) {
  // Opponent accepts the opening offer with probability 0.3.
  const GameSpec spec = GameSpec::BuyerSeller();
  BucketConfig config;
  config.optimism = false;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng = MakeRng({seed});
    OpponentModel model(spec, Agent::kTwo, config);
    const EpisodeState s = ApplyAction({}, spec, Action::Offer(50, 0));
    const int k = 400;
    for (int i = 0; i < k; ++i) {
      model.Observe(s, Uniform01(rng) < 0.3 ? Action::Accept(0) : Action::Reject(0));
    }
    const double p = ProbOf(model.Predict(s), Action::Accept(0));
    EXPECT_LT(std::abs(p - 0.3), 4.0 / std::sqrt(k)) << "seed " << seed;
  }
}

TEST(OpponentModelPolicyTest, ExposesPrediction) {
  const GameSpec spec = GameSpec::BuyerSeller();
  auto model = std::make_shared<OpponentModel>(spec, Agent::kTwo, BucketConfig{});
  const EpisodeState s = ApplyAction({}, spec, Action::Offer(50, 0));
  model->Observe(s, Action::Offer(45, 2));
  const OpponentModelPolicy policy(model);
  const Context context;
  const auto dist = policy.Distribution(PointFor(spec, context, s));
  ASSERT_TRUE(dist.has_value());
  EXPECT_EQ(*dist, model->Predict(s));
}

}  // namespace
}  // namespace repgame
