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

#include "repgame/match.h"

#include <ostream>

#include "repgame/errors.h"

namespace repgame {
namespace {

void Drain(PolicyProvider& p, MatchLog& log) {
  if (auto* d = dynamic_cast<DiagnosticsSource*>(&p)) {
    for (BonDecision& b : d->TakeDiagnostics()) log.decisions.push_back(std::move(b));
  }
  if (auto* s = dynamic_cast<IncidentSource*>(&p)) {
    for (Incident& i : s->TakeIncidents()) log.incidents.push_back(std::move(i));
  }
}

}  // namespace

std::uint64_t SeatKey(const GameSpec& spec, Agent seat) {
  if (spec.variant == GameVariant::kBuyerSeller) return seat == spec.seller ? 0 : 1;
  return static_cast<std::uint64_t>(Index(seat));
}

Rng TurnRng(std::uint64_t seed, int episode, int h, std::uint64_t seat_key) {
  return MakeRng({seed, static_cast<std::uint64_t>(episode),
                  static_cast<std::uint64_t>(h), seat_key});
}

MatchLog RunMatch(const GameSpec& spec, PolicyProvider& agent1,
                  PolicyProvider& agent2, int episodes, std::uint64_t seed) {
  spec.Validate();
  if (episodes < 1) throw InvalidArgument("a match needs at least one episode");
  MatchLog log;
  log.agent1 = agent1.Name();
  log.agent2 = agent2.Name();
  log.seed = seed;
  log.spec = spec;
  for (int t = 1; t <= episodes; ++t) {
    EpisodeState state;
    while (!state.terminal()) {
      const DecisionPoint point = PointFor(spec, log.context, state, t);
      PolicyProvider& mover = point.agent == Agent::kOne ? agent1 : agent2;
      Rng rng = TurnRng(seed, t, state.h, SeatKey(spec, point.agent));
      Action a;
      try {
        a = mover.Act(point, rng);
      } catch (const BridgeError& e) {
        Drain(mover, log);
        log.incidents.push_back({t, state.h, mover.Name(),
                                 std::string("episode aborted: ") + e.what()});
        throw BridgeError("episode " + std::to_string(t) + " aborted: " + e.what());
      }
      Drain(mover, log);
      const Verdict v = ValidateAction(state, spec, a);
      if (!v) {
        throw ProtocolError("provider '" + mover.Name() + "' played an illegal " +
                            DescribeAction(a, spec) + " at episode " +
                            std::to_string(t) + ", turn " + std::to_string(state.h) +
                            ": " + v.reason);
      }
      state = ApplyAction(state, spec, a);
    }
    log.context.Append(state, EpisodeRewards(state, spec));
  }
  return log;
}

Json ToJson(const MatchLog& log) {
  Json decisions = Json::array();
  for (const BonDecision& d : log.decisions) decisions.push_back(ToJson(log.spec, d));
  Json incidents = Json::array();
  for (const Incident& i : log.incidents) {
    incidents.push_back({{"episode", i.episode}, {"h", i.h},
                         {"provider", i.provider}, {"detail", i.detail}});
  }
  return {{"agent1", log.agent1},
          {"agent2", log.agent2},
          {"seed", log.seed},
          {"game", ToJson(log.spec)},
          {"episodes", ToJson(log.spec, log.context)},
          {"bon_decisions", decisions},
          {"incidents", incidents}};
}

MatchLog MatchLogFromJson(const Json& j) {
  MatchLog log;
  log.agent1 = j.at("agent1").get<std::string>();
  log.agent2 = j.at("agent2").get<std::string>();
  log.seed = j.at("seed").get<std::uint64_t>();
  log.spec = GameSpecFromJson(j.at("game"));
  log.context = ContextFromJson(log.spec, j.at("episodes"));
  for (const Json& d : j.value("bon_decisions", Json::array())) {
    BonDecision b;
    b.episode = d.at("episode").get<int>();
    b.h = d.at("h").get<int>();
    b.agent = AgentFromInt(d.at("agent").get<int>());
    b.prefix = TrajectoryFromJson(log.spec, d.at("prefix"));
    const Json& set = d.at("set");
    b.set.chosen = set.at("chosen").get<int>();
    for (const Json& c : set.at("candidates")) {
      b.set.candidates.push_back({ActionFromJson(log.spec, c.at("action")),
                                  c.at("family").get<std::string>(),
                                  c.at("estimate").get<double>(),
                                  c.at("samples").get<std::vector<double>>()});
    }
    log.decisions.push_back(std::move(b));
  }
  for (const Json& i : j.value("incidents", Json::array())) {
    log.incidents.push_back({i.at("episode").get<int>(), i.at("h").get<int>(),
                             i.at("provider").get<std::string>(),
                             i.at("detail").get<std::string>()});
  }
  return log;
}

void WriteTrajectoriesJsonl(const MatchLog& log, std::ostream& out) {
  const GameSpec& spec = log.spec;
  for (const EpisodeRecord& e : log.context.episodes()) {
    for (const Turn& t : e.turns) {
      Json line{{"episode", e.episode},
                {"h", t.h},
                {"agent", static_cast<int>(t.agent)},
                {"proposal_kind", std::string(ProposalKindName(t.action.kind))},
                {"payload", t.action.kind == ProposalKind::kOffer
                                ? PayloadToJson(spec, t.action.payload)
                                : Json(nullptr)},
                {"message", MessageToJson(spec, t.action.message)}};
      out << Dump(line) << '\n';
    }
    Json terminal{{"episode", e.episode},
                  {"cause", std::string(CauseName(e.cause))},
                  {"deal_payload", e.deal ? PayloadToJson(spec, *e.deal) : Json(nullptr)},
                  {"r1", e.rewards.r1},
                  {"r2", e.rewards.r2}};
    out << Dump(terminal) << '\n';
  }
}

}  // namespace repgame
