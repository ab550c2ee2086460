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

#include "repgame/negotiation.h"

#include <gtest/gtest.h>

#include "repgame/errors.h"
#include "repgame/oracle.h"
#include "repgame/policy.h"
#include "repgame/rng.h"

namespace repgame {
namespace {

GameSpec NarrowGridSpec() {
  GameSpec spec = GameSpec::BuyerSeller();
  spec.price_grid = IntegerGrid(43, 63);
  return spec;
}

EpisodeState Play(const GameSpec& spec, const std::vector<Action>& actions) {
  EpisodeState s;
  for (const Action& a : actions) s = ApplyAction(s, spec, a);
  return s;
}

TEST(WhoseTurnTest, Parity) {
  EXPECT_EQ(WhoseTurn(1, Agent::kOne), Agent::kOne);
  EXPECT_EQ(WhoseTurn(2, Agent::kOne), Agent::kTwo);
  EXPECT_EQ(WhoseTurn(3, Agent::kTwo), Agent::kTwo);
  EXPECT_EQ(WhoseTurn(1, Agent::kTwo), Agent::kTwo);
  EXPECT_EQ(WhoseTurn(4, Agent::kTwo), Agent::kOne);
  EXPECT_THROW(WhoseTurn(0, Agent::kOne), InvalidArgument);
}

TEST(GameSpecTest, DefaultsValidate) {
  EXPECT_NO_THROW(GameSpec::BuyerSeller().Validate());
  EXPECT_NO_THROW(GameSpec::ResourceExchange().Validate());
  EXPECT_EQ(GameSpec::BuyerSeller().alphabet_size(), 8);
}

TEST(GameSpecTest, RejectsBrokenInvariants) {
  GameSpec spec = GameSpec::BuyerSeller();
  spec.horizon = 0;
  EXPECT_THROW(spec.Validate(), InvalidArgument);
  spec = GameSpec::BuyerSeller();
  spec.budget = -1.0;
  EXPECT_THROW(spec.Validate(), InvalidArgument);
  spec = GameSpec::BuyerSeller();
  spec.price_grid.clear();
  EXPECT_THROW(spec.Validate(), InvalidArgument);
  spec = GameSpec::BuyerSeller();
  spec.message_alphabet.clear();
  EXPECT_THROW(spec.Validate(), InvalidArgument);
}

TEST(ValidateActionTest, AcceptNeedsStandingOffer) {
  const GameSpec spec = NarrowGridSpec();
  EXPECT_FALSE(ValidateAction({}, spec, Action::Accept(0)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Reject(0)));
}

TEST(ValidateActionTest, OwnOfferCannotBeAnswered) {
  const GameSpec spec = NarrowGridSpec();
  // Agent 1 offers, agent 2 waits, so the standing offer is agent 1's own.
  const EpisodeState s = Play(spec, {Action::Offer(50, 0), Action::Wait()});
  EXPECT_FALSE(ValidateAction(s, spec, Action::Accept(0)));
  EXPECT_TRUE(ValidateAction(s, spec, Action::Wait(1)));
}

TEST(ValidateActionTest, OfferOnGrid) {
  const GameSpec spec = NarrowGridSpec();
  EXPECT_TRUE(ValidateAction({}, spec, Action::Offer(50, 0)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Offer(42, 0)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Offer(50.5, 0)));
}

TEST(ValidateActionTest, TransferWithinInventory) {
  const GameSpec spec = GameSpec::ResourceExchange();
  EXPECT_FALSE(ValidateAction({}, spec, Action::Transfer(30, 0, 0)));
  EXPECT_TRUE(ValidateAction({}, spec, Action::Transfer(5, -5, 0)));
  EXPECT_TRUE(ValidateAction({}, spec, Action::Transfer(-25, 25, 0)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Transfer(6, 0, 0)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Transfer(0, -6, 0)));
}

TEST(ValidateActionTest, MessageRules) {
  const GameSpec spec = NarrowGridSpec();
  EXPECT_TRUE(ValidateAction({}, spec, Action::Wait()));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Offer(50, kEmptyMessage)));
  EXPECT_FALSE(ValidateAction({}, spec, Action::Offer(50, spec.alphabet_size())));
}

TEST(ValidateActionTest, TerminalStateThrows) {
  const GameSpec spec = NarrowGridSpec();
  const EpisodeState s = Play(spec, {Action::Offer(50, 0), Action::Reject(0)});
  EXPECT_THROW(ValidateAction(s, spec, Action::Wait()), ProtocolError);
  EXPECT_THROW(ApplyAction(s, spec, Action::Wait()), ProtocolError);
}

TEST(ApplyActionTest, AcceptClosesAtStandingPrice) {
  const GameSpec spec = NarrowGridSpec();
  const EpisodeState s = Play(spec, {Action::Offer(50, 0), Action::Accept(1)});
  EXPECT_EQ(s.cause, TerminalCause::kAccepted);
  ASSERT_TRUE(s.deal.has_value());
  EXPECT_EQ(s.deal->price, 50.0);
  EXPECT_FALSE(s.standing_offer.has_value());
  EXPECT_EQ(s.trajectory.size(), 2u);
}

TEST(ApplyActionTest, RejectEndsWithZeroRewards) {
  const GameSpec spec = NarrowGridSpec();
  const EpisodeState s = Play(spec, {Action::Offer(50, 0), Action::Reject(0)});
  EXPECT_EQ(s.cause, TerminalCause::kRejected);
  EXPECT_FALSE(s.standing_offer.has_value());
  const RewardPair r = EpisodeRewards(s, spec);
  EXPECT_EQ(r.r1, 0.0);
  EXPECT_EQ(r.r2, 0.0);
}

TEST(ApplyActionTest, OfferAtLastTurnExceedsHorizon) {
  GameSpec spec = NarrowGridSpec();
  spec.horizon = 3;
  const EpisodeState s =
      Play(spec, {Action::Offer(50, 0), Action::Offer(55, 0), Action::Offer(52, 0)});
  EXPECT_EQ(s.cause, TerminalCause::kHorizonExceeded);
  EXPECT_EQ(s.h, 4);
  EXPECT_EQ(EpisodeRewards(s, spec).r1, 0.0);
}

TEST(ApplyActionTest, NewOfferReplacesStandingOffer) {
  const GameSpec spec = NarrowGridSpec();
  const EpisodeState s = Play(spec, {Action::Offer(60, 0), Action::Offer(45, 2)});
  ASSERT_TRUE(s.standing_offer.has_value());
  EXPECT_EQ(s.standing_offer->proposer, Agent::kTwo);
  EXPECT_EQ(s.standing_offer->payload.price, 45.0);
  EXPECT_EQ(s.h, 3);
}

TEST(ApplyActionTest, IllegalActionThrows) {
  const GameSpec spec = NarrowGridSpec();
  EXPECT_THROW(ApplyAction({}, spec, Action::Accept(0)), ProtocolError);
}

TEST(EpisodeRewardsTest, BuyerSellerDeal) {
  const GameSpec spec = NarrowGridSpec();
  const RewardPair r =
      EpisodeRewards(Play(spec, {Action::Offer(50, 0), Action::Accept(0)}), spec);
  EXPECT_DOUBLE_EQ(r.r1, 7.0);   // seller
  EXPECT_DOUBLE_EQ(r.r2, 13.0);  // buyer
  EXPECT_DOUBLE_EQ(r.normalized1, 0.35);
  EXPECT_DOUBLE_EQ(r.normalized2, 0.65);
}

TEST(EpisodeRewardsTest, ExchangeDeal) {
  GameSpec spec = GameSpec::ResourceExchange();
  spec.normalization = 12.0;
  const RewardPair r = EpisodeRewards(
      Play(spec, {Action::Transfer(-1, 5, 0), Action::Accept(0)}), spec);
  EXPECT_DOUBLE_EQ(r.r1, 12.0);
  EXPECT_DOUBLE_EQ(r.r2, 0.0);
  EXPECT_DOUBLE_EQ(r.normalized1, 1.0);
}

TEST(EpisodeRewardsTest, HorizonExceededAndOngoing) {
  GameSpec spec = NarrowGridSpec();
  spec.horizon = 1;
  const EpisodeState s = Play(spec, {Action::Offer(50, 0)});
  EXPECT_EQ(EpisodeRewards(s, spec), RewardPair{});
  EXPECT_THROW(EpisodeRewards(EpisodeState{}, spec), ProtocolError);
}

TEST(NormalizeRewardsTest, Cases) {
  const GameSpec spec = GameSpec::BuyerSeller();
  EXPECT_DOUBLE_EQ(NormalizeRewards({7.0, 13.0}, spec).normalized1, 0.35);
  EXPECT_EQ(NormalizeRewards({}, spec).normalized1, 0.0);
  GameSpec flat = spec;
  flat.budget = flat.production_cost;
  EXPECT_THROW(NormalizeRewards({1.0, 0.0}, flat), InvalidArgument);
}

TEST(NormalizeRewardsTest, ExchangeDefaultsToR1Max) {
  const GameSpec spec = GameSpec::ResourceExchange();
  EXPECT_DOUBLE_EQ(NormalizationConstant(spec), ComputeR1Max(spec).value);
  EXPECT_DOUBLE_EQ(NormalizeRewards({12.0, 0.0}, spec).normalized1,
                   12.0 / ComputeR1Max(spec).value);
}

TEST(ContextTest, AppendKeepsOrderAndRewards) {
  const GameSpec spec = NarrowGridSpec();
  Context c;
  EXPECT_TRUE(c.empty());
  for (int t = 0; t < 20; ++t) {
    const EpisodeState s =
        Play(spec, {Action::Offer(43 + t, t % 8), Action::Accept(0)});
    const RewardPair r = EpisodeRewards(s, spec);
    const Context before = c;
    c = AppendContext(c, s, r);
    ASSERT_EQ(c.size(), before.size() + 1);
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(c[i], before[i]);
    EXPECT_EQ(c[c.size() - 1].rewards, r);
  }
  for (int t = 0; t < 20; ++t) EXPECT_EQ(c[t].deal->price, 43.0 + t);
  EXPECT_THROW(c.Append(EpisodeState{}, {}), ProtocolError);
}

TEST(MessageTest, LabelsRoundTrip) {
  const GameSpec spec = GameSpec::BuyerSeller();
  for (int m = 0; m < spec.alphabet_size(); ++m) {
    EXPECT_EQ(MessageIndex(spec, MessageLabel(spec, m)), m);
  }
  EXPECT_EQ(MessageIndex(spec, "no_such_token"), kEmptyMessage);
}

TEST(LegalActionsTest, EveryEnumeratedActionIsLegal) {
  GameSpec spec = NarrowGridSpec();
  spec.horizon = 4;
  EpisodeState s;
  const auto before = LegalActions(s, spec);
  for (const Action& a : before) EXPECT_TRUE(ValidateAction(s, spec, a));
  // No standing offer: offers, waits and the empty wait.
  const int n = static_cast<int>(spec.price_grid.size());
  EXPECT_EQ(before.size(), static_cast<std::size_t>(n * 8 + 8 + 1));
  s = ApplyAction(s, spec, Action::Offer(50, 0));
  const auto after = LegalActions(s, spec);
  EXPECT_EQ(after.size(), static_cast<std::size_t>(n * 8 + 8 + 8 + 8 + 1));
  for (const Action& a : after) EXPECT_TRUE(ValidateAction(s, spec, a));
}

// Random legal play on small random specs, checked against the protocol's
// invariants.
class ProtocolPropertyTest : public ::testing::TestWithParam<int> {};

GameSpec RandomSpec(Rng& rng) {
  GameSpec spec;
  if (rng() % 2 == 0) {
    spec = GameSpec::BuyerSeller();
    spec.production_cost = static_cast<double>(rng() % 30);
    spec.budget = spec.production_cost + 1 + static_cast<double>(rng() % 30);
    spec.price_grid = IntegerGrid(0, 70);
    spec.seller = rng() % 2 == 0 ? Agent::kOne : Agent::kTwo;
  } else {
    spec = GameSpec::ResourceExchange();
    for (auto& inv : spec.inventory) {
      inv = {static_cast<int>(rng() % 4), static_cast<int>(rng() % 4)};
    }
    // Tiny inventories can have r1_max = 0.
    spec.normalization = 1.0;
  }
  spec.horizon = 1 + static_cast<int>(rng() % 6);
  spec.starter = rng() % 2 == 0 ? Agent::kOne : Agent::kTwo;
  spec.message_alphabet = {"a", "b", "c"};
  return spec;
}

TEST_P(ProtocolPropertyTest, RandomLegalPlay) {
  Rng rng = MakeRng({static_cast<std::uint64_t>(GetParam()), 17});
  for (int game = 0; game < 25; ++game) {
    const GameSpec spec = RandomSpec(rng);
    EpisodeState s;
    int applied = 0;
    while (!s.terminal()) {
      const auto legal = LegalActions(s, spec);
      ASSERT_FALSE(legal.empty());
      s = ApplyAction(s, spec, legal[rng() % legal.size()]);
      ++applied;
      ASSERT_LE(s.h, spec.horizon + 1);
    }
    // Termination.
    EXPECT_LE(applied, spec.horizon + 1);
    // Alternation.
    for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
      EXPECT_EQ(s.trajectory[i].h, static_cast<int>(i) + 1);
      EXPECT_EQ(s.trajectory[i].agent, WhoseTurn(s.trajectory[i].h, spec.starter));
    }
    const RewardPair r = EpisodeRewards(s, spec);
    if (s.cause == TerminalCause::kAccepted) {
      ASSERT_TRUE(s.deal.has_value());
      if (spec.variant == GameVariant::kBuyerSeller) {
        EXPECT_NEAR(r.r1 + r.r2, spec.budget - spec.production_cost, 1e-12);
      } else {
        EXPECT_GE(s.deal->dx, -spec.inventory[0].x);
        EXPECT_LE(s.deal->dx, spec.inventory[1].x);
        EXPECT_GE(s.deal->dy, -spec.inventory[0].y);
        EXPECT_LE(s.deal->dy, spec.inventory[1].y);
      }
    } else {
      EXPECT_EQ(r.r1, 0.0);
      EXPECT_EQ(r.r2, 0.0);
    }
    // Replay determinism.
    const EpisodeState replay = ReplayTrajectory(s.trajectory, spec);
    EXPECT_EQ(replay, s);
    EXPECT_EQ(EpisodeRewards(replay, spec), r);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ProtocolPropertyTest, ::testing::Range(1, 9));

}  // namespace
}  // namespace repgame
