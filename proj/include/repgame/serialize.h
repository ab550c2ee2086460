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

// JSON forms of the domain types. Messages travel as alphabet labels (the
// empty message as ""), payloads as {"price"} or {"dx", "dy"} depending on the
// game. Parsers throw ConfigError with the offending field in the message.

#ifndef REPGAME_SERIALIZE_H_
#define REPGAME_SERIALIZE_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "repgame/errors.h"
#include "repgame/bon.h"
#include "repgame/negotiation.h"
#include "repgame/opponent_model.h"
#include "repgame/persona.h"
#include "repgame/sfp.h"

namespace repgame {

using Json = nlohmann::json;

// Throws ConfigError naming `where` when `j` has a key outside `allowed`.
void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               std::string_view where);

// j[key] as T, or `fallback` when absent or null. Throws ConfigError naming
// `where` on a type mismatch.
template <typename T>
T GetOr(const Json& j, std::string_view key, T fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(where) + "." + std::string(key) + " has the wrong type");
  }
}

Json ToJson(const GameSpec& spec);
// Missing fields take the defaults of the named variant.
GameSpec GameSpecFromJson(const Json& j);

Json PayloadToJson(const GameSpec& spec, const Payload& p);
Payload PayloadFromJson(const GameSpec& spec, const Json& j);

Json MessageToJson(const GameSpec& spec, int message);
int MessageFromJson(const GameSpec& spec, const Json& j);

// {"kind", payload fields for offers, "message"}.
Json ActionToJson(const GameSpec& spec, const Action& a);
Action ActionFromJson(const GameSpec& spec, const Json& j);

Json TurnToJson(const GameSpec& spec, const Turn& t);
Turn TurnFromJson(const GameSpec& spec, const Json& j);

Json TrajectoryToJson(const GameSpec& spec, const std::vector<Turn>& turns);
std::vector<Turn> TrajectoryFromJson(const GameSpec& spec, const Json& j);

Json ToJson(const GameSpec& spec, const EpisodeRecord& e);
EpisodeRecord EpisodeRecordFromJson(const GameSpec& spec, const Json& j);

Json ToJson(const GameSpec& spec, const Context& c);
Context ContextFromJson(const GameSpec& spec, const Json& j);

Json ToJson(const GameSpec& spec, const CandidateSet& set);
Json ToJson(const GameSpec& spec, const BonDecision& d);

Json ToJson(const PersonaParams& p);
PersonaParams PersonaParamsFromJson(const Json& j);

Json ToJson(const BoNConfig& c);
BoNConfig BoNConfigFromJson(const Json& j);

Json ToJson(const BucketConfig& c);
BucketConfig BucketConfigFromJson(const Json& j);

Json ToJson(const sfp::FTPLConfig& c);
sfp::FTPLConfig FTPLConfigFromJson(const Json& j);

// Compact dump used for every file and wire body.
std::string Dump(const Json& j);

}  // namespace repgame

#endif  // REPGAME_SERIALIZE_H_
