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

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgame/errors.h"

namespace repgame {
namespace {

int PayloadIndex(const GameSpec& spec, const Payload& p) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    for (std::size_t i = 0; i < spec.price_grid.size(); ++i) {
      if (spec.price_grid[i] == p.price) return static_cast<int>(i);
    }
    return -1;
  }
  const int span_y = spec.inventory[0].y + spec.inventory[1].y + 1;
  return (p.dx + spec.inventory[0].x) * span_y + (p.dy + spec.inventory[0].y);
}

int PayloadBucket(const GameSpec& spec, const Payload& p, int buckets) {
  if (buckets <= 0) return PayloadIndex(spec, p);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Payload& q : OfferPayloads(spec)) {
    const double r = DealRewards(spec, q).first;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (hi <= lo) return 0;
  const double r = DealRewards(spec, p).first;
  const int b = static_cast<int>(std::floor(buckets * (r - lo) / (hi - lo)));
  return std::clamp(b, 0, buckets - 1);
}

bool Legal(const EpisodeState& state, const GameSpec& spec, const Action& a) {
  return ValidateAction(state, spec, a).legal;
}

}  // namespace

void BucketConfig::Validate() const {
  if (payload_buckets < 0) throw InvalidArgument("payload_buckets must be >= 0");
  if (!(smoothing >= 0.0)) throw InvalidArgument("smoothing must be >= 0");
}

BucketKey MakeBucketKey(const GameSpec& spec, const EpisodeState& state,
                        Agent target, const BucketConfig& config) {
  BucketKey key;
  key.h = state.h;
  if (state.standing_offer) {
    key.standing = static_cast<int>(state.standing_offer->proposer);
    key.payload_bucket =
        PayloadBucket(spec, state.standing_offer->payload, config.payload_buckets);
  }
  if (config.use_last_message && !state.trajectory.empty()) {
    key.last_message = state.trajectory.back().action.message;
  }
  if (config.use_own_last_offer) {
    for (auto it = state.trajectory.rbegin(); it != state.trajectory.rend(); ++it) {
      if (it->agent == target && it->action.kind == ProposalKind::kOffer) {
        key.own_last_offer =
            PayloadBucket(spec, it->action.payload, config.payload_buckets);
        break;
      }
    }
  }
  return key;
}

void OpponentModel::Observe(const EpisodeState& state, const Action& action) {
  ++counts_[MakeBucketKey(spec_, state, target_, config_)][action];
  ++total_;
}

int OpponentModel::Visits(const BucketKey& key) const {
  auto it = counts_.find(key);
  if (it == counts_.end()) return 0;
  std::int64_t n = 0;
  for (const auto& [a, c] : it->second) n += c;
  return static_cast<int>(n);
}

ActionDistribution OpponentModel::Predict(const EpisodeState& state) const {
  if (state.terminal() || WhoseTurn(state.h, spec_.starter) != target_) {
    throw ProtocolError("opponent model queried off the modeled agent's turn");
  }
  ActionDistribution out;
  auto it = counts_.find(MakeBucketKey(spec_, state, target_, config_));
  if (it != counts_.end()) {
    if (config_.smoothing > 0.0) {
      for (const Action& a : LegalActions(state, spec_)) {
        auto c = it->second.find(a);
        const double n = c == it->second.end() ? 0.0 : static_cast<double>(c->second);
        out.push_back({a, n + config_.smoothing});
      }
    } else {
      for (const auto& [a, c] : it->second) {
        if (Legal(state, spec_, a)) out.push_back({a, static_cast<double>(c)});
      }
    }
    if (!out.empty()) return Canonicalize(std::move(out));
  }
  if (config_.optimism) {
    return {{OptimisticResponse(spec_, state, target_), 1.0}};
  }
  const auto legal = LegalActions(state, spec_);
  for (const Action& a : legal) out.push_back({a, 1.0 / legal.size()});
  return out;
}

OpponentModel FitOpponentModel(const GameSpec& spec, const Context& context,
                               const std::vector<Turn>& partial, Agent target,
                               const BucketConfig& config) {
  config.Validate();
  OpponentModel model(spec, target, config);
  auto replay = [&](const std::vector<Turn>& turns) {
    EpisodeState state;
    for (const Turn& t : turns) {
      if (t.agent == target) model.Observe(state, t.action);
      state = ApplyAction(state, spec, t.action);
    }
  };
  for (const EpisodeRecord& e : context.episodes()) replay(e.turns);
  replay(partial);
  return model;
}

Action PredictOpponent(const OpponentModel& model, const EpisodeState& state,
                       Rng& rng) {
  return SampleAction(model.Predict(state), rng);
}

Action OptimisticResponse(const GameSpec& spec, const EpisodeState& state,
                          Agent target) {
  const Agent planner = Other(target);
  const int msg = 0;
  if (state.standing_offer && state.standing_offer->proposer == planner &&
      DealReward(spec, planner, state.standing_offer->payload) > 0.0) {
    return Action::Accept(msg);
  }
  const Payload* best = nullptr;
  double best_value = 0.0;
  const auto payloads = OfferPayloads(spec);
  for (const Payload& p : payloads) {
    const double v = DealReward(spec, planner, p);
    if (v > best_value) {
      best_value = v;
      best = &p;
    }
  }
  if (best != nullptr) return Action{ProposalKind::kOffer, *best, msg};
  return Action::Wait();
}

ActionDistribution OpponentModelPolicy::Compute(const DecisionPoint& point) const {
  return model_->Predict(point.state);
}

}  // namespace repgame
