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

// Empirical model of one agent's behaviour: decision points are mapped to
// coarse bucket keys and the model predicts the observed action frequencies
// per key. Unvisited keys fall back to the response most favourable to the
// planning side (optimism) or to uniform play.

#ifndef REPGAME_OPPONENT_MODEL_H_
#define REPGAME_OPPONENT_MODEL_H_

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "repgame/negotiation.h"
#include "repgame/policy.h"

namespace repgame {

struct BucketConfig {
  // Number of quantile buckets for the standing-offer payload over the offer
  // enumeration; 0 keeps every payload distinct.
  int payload_buckets = 5;
  bool use_last_message = true;
  // Also key on the modeled agent's own most recent offer in the episode.
  bool use_own_last_offer = false;
  // Pseudo-count added to every legal action of a visited key.
  double smoothing = 0.0;
  bool optimism = true;

  void Validate() const;
  bool operator==(const BucketConfig&) const = default;
};

struct BucketKey {
  int h = 1;
  // 0 when nothing stands, else the proposer's id.
  int standing = 0;
  int payload_bucket = -1;
  int last_message = kEmptyMessage;
  int own_last_offer = -1;
  auto operator<=>(const BucketKey&) const = default;
};

// Key of the decision point where `target` is to move.
BucketKey MakeBucketKey(const GameSpec& spec, const EpisodeState& state,
                        Agent target, const BucketConfig& config);

class OpponentModel {
 public:
  OpponentModel(GameSpec spec, Agent target, BucketConfig config)
      : spec_(std::move(spec)), target_(target), config_(config) {}

  // Records `action` taken by the target at `state`.
  void Observe(const EpisodeState& state, const Action& action);

  const GameSpec& spec() const { return spec_; }
  Agent target() const { return target_; }
  const BucketConfig& config() const { return config_; }

  int Visits(const BucketKey& key) const;
  const std::map<BucketKey, std::map<Action, std::int64_t>>& counts() const {
    return counts_;
  }
  std::int64_t total_observations() const { return total_; }

  // Predicted distribution for the target at `state` (which must be the
  // target's turn). Throws ProtocolError otherwise.
  ActionDistribution Predict(const EpisodeState& state) const;

  bool operator==(const OpponentModel&) const = default;

 private:
  GameSpec spec_;
  Agent target_;
  BucketConfig config_;
  std::map<BucketKey, std::map<Action, std::int64_t>> counts_;
  std::int64_t total_ = 0;
};

// Counts every turn of `target` in the context episodes and in `partial`.
OpponentModel FitOpponentModel(const GameSpec& spec, const Context& context,
                               const std::vector<Turn>& partial, Agent target,
                               const BucketConfig& config = {});

// Samples from the model's prediction. Throws ProtocolError off-turn.
Action PredictOpponent(const OpponentModel& model, const EpisodeState& state,
                       Rng& rng);

// Legal response of `target` maximizing the other side's reward: Accept of a
// standing offer that pays the other side > 0, else the offer best for the
// other side when it pays > 0, else Wait.
Action OptimisticResponse(const GameSpec& spec, const EpisodeState& state,
                          Agent target);

// Provider view of a fixed model.
class OpponentModelPolicy : public DistributionPolicy {
 public:
  explicit OpponentModelPolicy(std::shared_ptr<const OpponentModel> model,
                               std::string name = "opponent_model")
      : model_(std::move(model)), name_(std::move(name)) {}

  const OpponentModel& model() const { return *model_; }
  std::string Name() const override { return name_; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  std::shared_ptr<const OpponentModel> model_;
  std::string name_;
};

}  // namespace repgame

#endif  // REPGAME_OPPONENT_MODEL_H_
