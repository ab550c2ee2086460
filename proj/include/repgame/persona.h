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

// Scripted negotiators. Each persona walks down its own "offer ladder" (the
// mutually acceptable, Pareto-efficient payloads ordered from best to worst
// for itself) on a concession schedule and accepts offers whose share of the
// surplus clears its threshold. Families differ in anchor, pace, threshold
// and how they react to the other side's messages and concessions.

#ifndef REPGAME_PERSONA_H_
#define REPGAME_PERSONA_H_

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "repgame/negotiation.h"
#include "repgame/policy.h"

namespace repgame {

enum class PersonaFamily {
  kRational,
  kCunning,
  kDesperate,
  kTitForTat,
  kFairness,
  kEmotional,
  kBrainstormMix,
};

std::string_view PersonaFamilyName(PersonaFamily f);
PersonaFamily ParsePersonaFamily(std::string_view name);
std::vector<PersonaFamily> AllPersonaFamilies();

struct PersonaParams {
  PersonaFamily family = PersonaFamily::kRational;
  // Opening position on the ladder: 1 opens at the best rung for itself,
  // 0 opens at its reservation rung.
  double anchor = 0.8;
  // Fraction of the remaining distance to the reservation rung conceded with
  // each new offer.
  double concession = 0.3;
  // Minimum own share of the deal surplus to accept (also the floor of its
  // own offers).
  double accept_share = 0.3;
  // Fairness family: offers below this share are rejected or countered.
  double fairness_share = 0.4;
  // Emotional family: probability of walking away when insulted or lowballed.
  double retaliation = 0.5;
  // Spread of the rung jitter; 0 makes the persona deterministic.
  double temperature = 0.0;

  static PersonaParams Defaults(PersonaFamily family);
  void Validate() const;
  bool operator==(const PersonaParams&) const = default;
};

class Persona : public DistributionPolicy {
 public:
  explicit Persona(PersonaParams params, std::string name = "");

  const PersonaParams& params() const { return params_; }
  std::string Name() const override { return name_; }

 protected:
  // Throws ProtocolError when called for an agent that is not to move.
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  PersonaParams params_;
  std::string name_;
};

// Samples the persona's action. Deterministic given its arguments.
Action PersonaAct(const PersonaParams& params, const DecisionPoint& point,
                  Rng& rng);

// Mutually acceptable Pareto-efficient payloads, best first for `side`. When
// no payload leaves both sides nonnegative, every payload, best first.
std::shared_ptr<const std::vector<Payload>> OfferLadder(const GameSpec& spec,
                                                        Agent side);

// Own share r_side / (r1 + r2) of a deal, 0 when the joint surplus is <= 0.
double SurplusShare(const GameSpec& spec, Agent side, const Payload& payload);

// Ladder rung whose own reward is closest to that of `payload`.
int LadderPosition(const std::vector<Payload>& ladder, const GameSpec& spec,
                   Agent side, const Payload& payload);

// High-level strategies used for structured candidate generation.
enum class StrategyFamily {
  kAggressiveAnchor,
  kFairSplit,
  kFastConcession,
  kMirror,
  kDeadlinePressure,
};

inline constexpr int kStrategyFamilyCount = 5;

std::string_view StrategyFamilyName(StrategyFamily f);
std::array<StrategyFamily, kStrategyFamilyCount> AllStrategyFamilies();

// Deterministic rewrite of `base` following the strategy; `intensity` in
// [0, 1] scales how far it moves. The result is legal at `point`.
Action ApplyStrategy(StrategyFamily family, const Action& base,
                     const DecisionPoint& point, double intensity);

}  // namespace repgame

#endif  // REPGAME_PERSONA_H_
