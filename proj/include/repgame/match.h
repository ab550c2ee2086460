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

// Repeated play of T episodes between two providers, with the record of
// every turn, reward, Best-of-N decision and provider incident.

#ifndef REPGAME_MATCH_H_
#define REPGAME_MATCH_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "repgame/bon.h"
#include "repgame/negotiation.h"
#include "repgame/policy.h"
#include "repgame/serialize.h"

namespace repgame {

struct MatchLog {
  std::string agent1;
  std::string agent2;
  std::uint64_t seed = 0;
  GameSpec spec;
  Context context;
  std::vector<BonDecision> decisions;
  std::vector<Incident> incidents;

  int episodes() const { return static_cast<int>(context.size()); }
  bool operator==(const MatchLog&) const = default;
};

// Stream key of a seat. It follows the role (seller / buyer, or the
// inventory side), so exchanging which provider sits where while swapping
// the role assignment replays the same random streams.
std::uint64_t SeatKey(const GameSpec& spec, Agent seat);

// Random stream of one turn.
Rng TurnRng(std::uint64_t seed, int episode, int h, std::uint64_t seat_key);

// Plays `episodes` episodes, appending each to the context. Throws
// ProtocolError when a provider emits an illegal action and BridgeError (with
// the episode aborted) when an external provider's transport fails.
MatchLog RunMatch(const GameSpec& spec, PolicyProvider& agent1,
                  PolicyProvider& agent2, int episodes, std::uint64_t seed);

Json ToJson(const MatchLog& log);
MatchLog MatchLogFromJson(const Json& j);

// One line per turn {episode, h, agent, proposal_kind, payload, message} and
// one terminal line {episode, cause, deal_payload, r1, r2} per episode.
void WriteTrajectoriesJsonl(const MatchLog& log, std::ostream& out);

}  // namespace repgame

#endif  // REPGAME_MATCH_H_
