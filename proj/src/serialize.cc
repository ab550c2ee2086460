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

#include "repgame/serialize.h"

#include "repgame/errors.h"

namespace repgame {
namespace {

const Json& Require(const Json& j, std::string_view key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError(std::string(where) + " is missing \"" + std::string(key) + "\"");
  }
  return *it;
}

void RequireObject(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
}

Json RewardsToJson(const RewardPair& r) {
  return {{"r1", r.r1}, {"r2", r.r2}, {"normalized1", r.normalized1},
          {"normalized2", r.normalized2}};
}

RewardPair RewardsFromJson(const Json& j) {
  RewardPair r;
  r.r1 = GetOr(j, "r1", 0.0, "rewards");
  r.r2 = GetOr(j, "r2", 0.0, "rewards");
  r.normalized1 = GetOr(j, "normalized1", 0.0, "rewards");
  r.normalized2 = GetOr(j, "normalized2", 0.0, "rewards");
  return r;
}

}  // namespace

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               std::string_view where) {
  RequireObject(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      throw ConfigError("unknown field \"" + it.key() + "\" in " + std::string(where));
    }
  }
}

std::string Dump(const Json& j) { return j.dump(); }

Json ToJson(const GameSpec& spec) {
  Json j;
  j["variant"] = std::string(VariantName(spec.variant));
  j["horizon"] = spec.horizon;
  j["starter"] = static_cast<int>(spec.starter);
  j["production_cost"] = spec.production_cost;
  j["budget"] = spec.budget;
  j["seller"] = static_cast<int>(spec.seller);
  j["price_grid"] = spec.price_grid;
  j["inventory"] = Json::array();
  j["value"] = Json::array();
  for (int i = 0; i < 2; ++i) {
    j["inventory"].push_back({spec.inventory[i].x, spec.inventory[i].y});
    j["value"].push_back({spec.value[i].x, spec.value[i].y});
  }
  j["normalization"] = spec.normalization;
  j["message_alphabet"] = spec.message_alphabet;
  return j;
}

GameSpec GameSpecFromJson(const Json& j) {
  constexpr std::string_view kWhere = "game";
  CheckKeys(j, {"variant", "horizon", "starter", "production_cost", "budget",
                "seller", "price_grid", "inventory", "value", "normalization",
                "message_alphabet"},
            kWhere);
  GameVariant variant;
  try {
    variant = ParseVariant(GetOr<std::string>(j, "variant", "buyer_seller", kWhere));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("game.variant: ") + e.what());
  }
  GameSpec spec = variant == GameVariant::kBuyerSeller ? GameSpec::BuyerSeller()
                                                       : GameSpec::ResourceExchange();
  spec.horizon = GetOr(j, "horizon", spec.horizon, kWhere);
  try {
    spec.starter = AgentFromInt(GetOr(j, "starter", static_cast<int>(spec.starter), kWhere));
    spec.seller = AgentFromInt(GetOr(j, "seller", static_cast<int>(spec.seller), kWhere));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
  spec.production_cost = GetOr(j, "production_cost", spec.production_cost, kWhere);
  spec.budget = GetOr(j, "budget", spec.budget, kWhere);
  if (auto it = j.find("price_grid"); it != j.end()) {
    if (it->is_object()) {
      CheckKeys(*it, {"lo", "hi"}, "game.price_grid");
      spec.price_grid = IntegerGrid(Require(*it, "lo", "game.price_grid").get<int>(),
                                    Require(*it, "hi", "game.price_grid").get<int>());
    } else {
      spec.price_grid = GetOr(j, "price_grid", spec.price_grid, kWhere);
    }
  }
  auto pairs = [&](std::string_view key, auto& target) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array() || it->size() != 2) {
      throw ConfigError("game." + std::string(key) + " must hold two [x, y] pairs");
    }
    for (int i = 0; i < 2; ++i) {
      const Json& p = (*it)[i];
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("game." + std::string(key) + " must hold two [x, y] pairs");
      }
      target[i].x = p[0].get<std::remove_reference_t<decltype(target[i].x)>>();
      target[i].y = p[1].get<std::remove_reference_t<decltype(target[i].y)>>();
    }
  };
  pairs("inventory", spec.inventory);
  pairs("value", spec.value);
  spec.normalization = GetOr(j, "normalization", spec.normalization, kWhere);
  spec.message_alphabet = GetOr(j, "message_alphabet", spec.message_alphabet, kWhere);
  try {
    spec.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
  return spec;
}

Json PayloadToJson(const GameSpec& spec, const Payload& p) {
  if (spec.variant == GameVariant::kBuyerSeller) return {{"price", p.price}};
  return {{"dx", p.dx}, {"dy", p.dy}};
}

Payload PayloadFromJson(const GameSpec& spec, const Json& j) {
  RequireObject(j, "payload");
  Payload p;
  if (spec.variant == GameVariant::kBuyerSeller) {
    const Json& price = Require(j, "price", "payload");
    if (!price.is_number()) throw ConfigError("payload.price must be a number");
    p.price = price.get<double>();
  } else {
    const Json& dx = Require(j, "dx", "payload");
    const Json& dy = Require(j, "dy", "payload");
    if (!dx.is_number_integer() || !dy.is_number_integer()) {
      throw ConfigError("payload.dx and payload.dy must be integers");
    }
    p.dx = dx.get<int>();
    p.dy = dy.get<int>();
  }
  return p;
}

Json MessageToJson(const GameSpec& spec, int message) {
  return message == kEmptyMessage ? std::string() : MessageLabel(spec, message);
}

int MessageFromJson(const GameSpec& spec, const Json& j) {
  if (j.is_null()) return kEmptyMessage;
  if (j.is_number_integer()) return j.get<int>();
  if (!j.is_string()) throw ConfigError("message must be a label string");
  const std::string label = j.get<std::string>();
  if (label.empty()) return kEmptyMessage;
  const int idx = MessageIndex(spec, label);
  if (idx == kEmptyMessage) throw ConfigError("unknown message label \"" + label + "\"");
  return idx;
}

Json ActionToJson(const GameSpec& spec, const Action& a) {
  Json j;
  j["kind"] = std::string(ProposalKindName(a.kind));
  if (a.kind == ProposalKind::kOffer) {
    j.update(PayloadToJson(spec, a.payload));
  }
  j["message"] = MessageToJson(spec, a.message);
  return j;
}

Action ActionFromJson(const GameSpec& spec, const Json& j) {
  RequireObject(j, "action");
  Action a;
  try {
    a.kind = ParseProposalKind(Require(j, "kind", "action").get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("action.kind: ") + e.what());
  } catch (const Json::exception&) {
    throw ConfigError("action.kind must be a string");
  }
  if (a.kind == ProposalKind::kOffer) a.payload = PayloadFromJson(spec, j);
  auto it = j.find("message");
  a.message = it == j.end() ? kEmptyMessage : MessageFromJson(spec, *it);
  return a;
}

Json TurnToJson(const GameSpec& spec, const Turn& t) {
  Json j = ActionToJson(spec, t.action);
  j["h"] = t.h;
  j["agent"] = static_cast<int>(t.agent);
  return j;
}

Turn TurnFromJson(const GameSpec& spec, const Json& j) {
  Turn t;
  t.action = ActionFromJson(spec, j);
  t.h = GetOr(j, "h", 1, "turn");
  t.agent = AgentFromInt(GetOr(j, "agent", 1, "turn"));
  return t;
}

Json TrajectoryToJson(const GameSpec& spec, const std::vector<Turn>& turns) {
  Json j = Json::array();
  for (const Turn& t : turns) j.push_back(TurnToJson(spec, t));
  return j;
}

std::vector<Turn> TrajectoryFromJson(const GameSpec& spec, const Json& j) {
  if (!j.is_array()) throw ConfigError("trajectory must be an array");
  std::vector<Turn> out;
  for (const Json& t : j) out.push_back(TurnFromJson(spec, t));
  return out;
}

Json ToJson(const GameSpec& spec, const EpisodeRecord& e) {
  Json j;
  j["episode"] = e.episode;
  j["turns"] = TrajectoryToJson(spec, e.turns);
  j["cause"] = std::string(CauseName(e.cause));
  j["deal"] = e.deal ? PayloadToJson(spec, *e.deal) : Json(nullptr);
  j["rewards"] = RewardsToJson(e.rewards);
  return j;
}

EpisodeRecord EpisodeRecordFromJson(const GameSpec& spec, const Json& j) {
  EpisodeRecord e;
  e.episode = GetOr(j, "episode", 0, "episode");
  e.turns = TrajectoryFromJson(spec, Require(j, "turns", "episode"));
  e.cause = ParseCause(GetOr<std::string>(j, "cause", "ongoing", "episode"));
  if (auto it = j.find("deal"); it != j.end() && !it->is_null()) {
    e.deal = PayloadFromJson(spec, *it);
  }
  e.rewards = RewardsFromJson(Require(j, "rewards", "episode"));
  return e;
}

Json ToJson(const GameSpec& spec, const Context& c) {
  Json j = Json::array();
  for (const EpisodeRecord& e : c.episodes()) j.push_back(ToJson(spec, e));
  return j;
}

Context ContextFromJson(const GameSpec& spec, const Json& j) {
  if (!j.is_array()) throw ConfigError("context must be an array");
  Context c;
  for (const Json& e : j) {
    EpisodeRecord rec = EpisodeRecordFromJson(spec, e);
    EpisodeState final_state;
    try {
      final_state = ReplayTrajectory(rec.turns, spec);
    } catch (const Error& err) {
      throw ConfigError(std::string("context episode does not replay: ") + err.what());
    }
    c.Append(final_state, rec.rewards);
  }
  return c;
}

Json ToJson(const GameSpec& spec, const CandidateSet& set) {
  Json cands = Json::array();
  for (const Candidate& c : set.candidates) {
    cands.push_back({{"action", ActionToJson(spec, c.action)},
                     {"family", c.family},
                     {"estimate", c.estimate},
                     {"samples", c.samples}});
  }
  return {{"candidates", cands}, {"chosen", set.chosen}};
}

Json ToJson(const GameSpec& spec, const BonDecision& d) {
  return {{"episode", d.episode},
          {"h", d.h},
          {"agent", static_cast<int>(d.agent)},
          {"prefix", TrajectoryToJson(spec, d.prefix)},
          {"set", ToJson(spec, d.set)}};
}

Json ToJson(const PersonaParams& p) {
  return {{"family", std::string(PersonaFamilyName(p.family))},
          {"anchor", p.anchor},
          {"concession", p.concession},
          {"accept_share", p.accept_share},
          {"fairness_share", p.fairness_share},
          {"retaliation", p.retaliation},
          {"temperature", p.temperature}};
}

PersonaParams PersonaParamsFromJson(const Json& j) {
  constexpr std::string_view kWhere = "persona";
  if (j.is_string()) {
    try {
      return PersonaParams::Defaults(ParsePersonaFamily(j.get<std::string>()));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  CheckKeys(j, {"family", "anchor", "concession", "accept_share", "fairness_share",
                "retaliation", "temperature"},
            kWhere);
  PersonaParams p;
  try {
    p = PersonaParams::Defaults(
        ParsePersonaFamily(GetOr<std::string>(j, "family", "rational", kWhere)));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  p.anchor = GetOr(j, "anchor", p.anchor, kWhere);
  p.concession = GetOr(j, "concession", p.concession, kWhere);
  p.accept_share = GetOr(j, "accept_share", p.accept_share, kWhere);
  p.fairness_share = GetOr(j, "fairness_share", p.fairness_share, kWhere);
  p.retaliation = GetOr(j, "retaliation", p.retaliation, kWhere);
  p.temperature = GetOr(j, "temperature", p.temperature, kWhere);
  try {
    p.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("persona: ") + e.what());
  }
  return p;
}

Json ToJson(const BoNConfig& c) {
  return {{"n", c.n},
          {"generation", std::string(GenerationModeName(c.generation))},
          {"rollouts", c.rollouts},
          {"level", c.level},
          {"rollout_mode", std::string(RolloutModeName(c.rollout_mode))},
          {"brainstorm_intensity", c.brainstorm_intensity},
          {"max_simulated_turns", c.max_simulated_turns}};
}

BoNConfig BoNConfigFromJson(const Json& j) {
  constexpr std::string_view kWhere = "bon";
  CheckKeys(j, {"n", "generation", "rollouts", "level", "rollout_mode",
                "brainstorm_intensity", "max_simulated_turns"},
            kWhere);
  BoNConfig c;
  c.n = GetOr(j, "n", c.n, kWhere);
  c.generation = ParseGenerationMode(
      GetOr<std::string>(j, "generation", std::string(GenerationModeName(c.generation)), kWhere));
  c.rollouts = GetOr(j, "rollouts", c.rollouts, kWhere);
  c.level = GetOr(j, "level", c.level, kWhere);
  c.rollout_mode = ParseRolloutMode(
      GetOr<std::string>(j, "rollout_mode", std::string(RolloutModeName(c.rollout_mode)), kWhere));
  c.brainstorm_intensity = GetOr(j, "brainstorm_intensity", c.brainstorm_intensity, kWhere);
  c.max_simulated_turns = GetOr(j, "max_simulated_turns", c.max_simulated_turns, kWhere);
  c.Validate();
  return c;
}

Json ToJson(const BucketConfig& c) {
  return {{"payload_buckets", c.payload_buckets},
          {"use_last_message", c.use_last_message},
          {"use_own_last_offer", c.use_own_last_offer},
          {"smoothing", c.smoothing},
          {"optimism", c.optimism}};
}

BucketConfig BucketConfigFromJson(const Json& j) {
  constexpr std::string_view kWhere = "opponent_model";
  CheckKeys(j, {"payload_buckets", "use_last_message", "use_own_last_offer", "smoothing",
                "optimism"},
            kWhere);
  BucketConfig c;
  c.payload_buckets = GetOr(j, "payload_buckets", c.payload_buckets, kWhere);
  c.use_last_message = GetOr(j, "use_last_message", c.use_last_message, kWhere);
  c.use_own_last_offer = GetOr(j, "use_own_last_offer", c.use_own_last_offer, kWhere);
  c.smoothing = GetOr(j, "smoothing", c.smoothing, kWhere);
  c.optimism = GetOr(j, "optimism", c.optimism, kWhere);
  try {
    c.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("opponent_model: ") + e.what());
  }
  return c;
}

Json ToJson(const sfp::FTPLConfig& c) {
  return {{"noise_kind", std::string(sfp::NoiseKindName(c.noise_kind))},
          {"eta_scale", c.eta_scale},
          {"monte_carlo_draws", c.monte_carlo_draws}};
}

sfp::FTPLConfig FTPLConfigFromJson(const Json& j) {
  constexpr std::string_view kWhere = "ftpl";
  CheckKeys(j, {"noise_kind", "eta_scale", "monte_carlo_draws"}, kWhere);
  sfp::FTPLConfig c;
  try {
    c.noise_kind = sfp::ParseNoiseKind(GetOr<std::string>(
        j, "noise_kind", std::string(sfp::NoiseKindName(c.noise_kind)), kWhere));
    c.eta_scale = GetOr(j, "eta_scale", c.eta_scale, kWhere);
    c.monte_carlo_draws = GetOr(j, "monte_carlo_draws", c.monte_carlo_draws, kWhere);
    c.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("ftpl: ") + e.what());
  }
  return c;
}

}  // namespace repgame
