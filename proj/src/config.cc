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

#include "repgame/config.h"

#include <set>

#include "repgame/io.h"

#ifndef REPGAME_ASSET_DIR
#define REPGAME_ASSET_DIR "assets/prompts"
#endif

namespace repgame {

std::string_view CommandName(Command c) {
  switch (c) {
    case Command::kRunFtpl: return "run-ftpl";
    case Command::kRunMatrix: return "run-matrix";
    case Command::kRunBon: return "run-bon";
    case Command::kVerifyTheory: return "verify-theory";
    case Command::kServeBridge: return "serve-bridge";
  }
  return "run-bon";
}

Command ParseCommand(std::string_view name) {
  for (Command c : {Command::kRunFtpl, Command::kRunMatrix, Command::kRunBon,
                    Command::kVerifyTheory, Command::kServeBridge}) {
    if (CommandName(c) == name) return c;
  }
  throw ConfigError("unknown command \"" + std::string(name) + "\"");
}

std::string_view ProviderKindName(ProviderKind k) {
  switch (k) {
    case ProviderKind::kPersona: return "persona";
    case ProviderKind::kBon: return "bon";
    case ProviderKind::kBridge: return "bridge";
    case ProviderKind::kUniform: return "uniform";
  }
  return "persona";
}

ProviderKind ParseProviderKind(std::string_view name) {
  for (ProviderKind k : {ProviderKind::kPersona, ProviderKind::kBon, ProviderKind::kBridge,
                         ProviderKind::kUniform}) {
    if (ProviderKindName(k) == name) return k;
  }
  throw ConfigError("unknown provider kind \"" + std::string(name) + "\"");
}

std::vector<PersonaParams> AllPersonaDefaults() {
  std::vector<PersonaParams> out;
  for (PersonaFamily f : AllPersonaFamilies()) out.push_back(PersonaParams::Defaults(f));
  return out;
}

std::filesystem::path DefaultAssetDir() { return REPGAME_ASSET_DIR; }

namespace {

PersonaParams PersonaFrom(const Json& j, std::string_view where) {
  try {
    PersonaParams p = PersonaParamsFromJson(j);
    p.Validate();
    return p;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

Json AgentToJson(const AgentConfig& a) {
  return {{"kind", std::string(ProviderKindName(a.kind))},
          {"persona", ToJson(a.persona)},
          {"name", a.name}};
}

AgentConfig AgentFromJson(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  CheckKeys(j, {"kind", "persona", "name"}, where);
  AgentConfig a;
  a.kind = ParseProviderKind(GetOr<std::string>(j, "kind", "persona", where));
  if (auto it = j.find("persona"); it != j.end()) {
    a.persona = PersonaFrom(*it, std::string(where) + ".persona");
  }
  a.name = GetOr<std::string>(j, "name", "", where);
  return a;
}

Json SfpToJson(const SfpSection& s) {
  return {{"ftpl", ToJson(s.ftpl)},
          {"game_path", s.game_path},
          {"actions", s.actions},
          {"schedules", s.schedules},
          {"horizons", s.horizons}};
}

SfpSection SfpFromJson(const Json& j) {
  constexpr std::string_view kWhere = "sfp";
  CheckKeys(j, {"ftpl", "game_path", "actions", "schedules", "horizons"}, kWhere);
  SfpSection s;
  if (auto it = j.find("ftpl"); it != j.end()) s.ftpl = FTPLConfigFromJson(*it);
  s.game_path = GetOr(j, "game_path", s.game_path, kWhere);
  s.actions = GetOr(j, "actions", s.actions, kWhere);
  s.schedules = GetOr(j, "schedules", s.schedules, kWhere);
  s.horizons = GetOr(j, "horizons", s.horizons, kWhere);
  return s;
}

Json RunToJson(const RunSection& r) {
  return {{"episodes", r.episodes},   {"seeds", r.seeds}, {"output_dir", r.output_dir},
          {"run_id", r.run_id},       {"jobs", r.jobs},
          {"write_trajectories", r.write_trajectories}};
}

RunSection RunFromJson(const Json& j) {
  constexpr std::string_view kWhere = "run";
  CheckKeys(j, {"episodes", "seeds", "output_dir", "run_id", "jobs", "write_trajectories"},
            kWhere);
  RunSection r;
  r.episodes = GetOr(j, "episodes", r.episodes, kWhere);
  r.seeds = GetOr(j, "seeds", r.seeds, kWhere);
  r.output_dir = GetOr(j, "output_dir", r.output_dir, kWhere);
  r.run_id = GetOr(j, "run_id", r.run_id, kWhere);
  r.jobs = GetOr(j, "jobs", r.jobs, kWhere);
  r.write_trajectories = GetOr(j, "write_trajectories", r.write_trajectories, kWhere);
  return r;
}

Json MatrixToJson(const MatrixSection& m) {
  Json personas = Json::array();
  for (const auto& p : m.personas) personas.push_back(ToJson(p));
  return {{"personas", personas}};
}

MatrixSection MatrixFromJson(const Json& j) {
  CheckKeys(j, {"personas"}, "matrix");
  MatrixSection m;
  if (auto it = j.find("personas"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("matrix.personas must be an array");
    m.personas.clear();
    for (const Json& p : *it) m.personas.push_back(PersonaFrom(p, "matrix.personas"));
  }
  return m;
}

Json BridgeToJson(const BridgeSection& b) {
  return {{"transport", b.transport == BridgeTransportKind::kHttp ? "http" : "subprocess"},
          {"command", b.command},
          {"host", b.host},
          {"port", b.port},
          {"timeout_ms", b.timeout_ms},
          {"retries", b.retries},
          {"template_id", b.template_id},
          {"persona_template", b.persona_template},
          {"assets_dir", b.assets_dir},
          {"serve_mode", b.serve_mode},
          {"serve_persona", ToJson(b.serve_persona)}};
}

BridgeSection BridgeFromJson(const Json& j) {
  constexpr std::string_view kWhere = "bridge";
  CheckKeys(j, {"transport", "command", "host", "port", "timeout_ms", "retries", "template_id",
                "persona_template", "assets_dir", "serve_mode", "serve_persona"},
            kWhere);
  BridgeSection b;
  const std::string transport = GetOr<std::string>(j, "transport", "subprocess", kWhere);
  if (transport == "http") {
    b.transport = BridgeTransportKind::kHttp;
  } else if (transport != "subprocess") {
    throw ConfigError("bridge.transport must be \"subprocess\" or \"http\"");
  }
  b.command = GetOr(j, "command", b.command, kWhere);
  b.host = GetOr(j, "host", b.host, kWhere);
  b.port = GetOr(j, "port", b.port, kWhere);
  b.timeout_ms = GetOr(j, "timeout_ms", b.timeout_ms, kWhere);
  b.retries = GetOr(j, "retries", b.retries, kWhere);
  b.template_id = GetOr(j, "template_id", b.template_id, kWhere);
  b.persona_template = GetOr(j, "persona_template", b.persona_template, kWhere);
  b.assets_dir = GetOr(j, "assets_dir", b.assets_dir, kWhere);
  b.serve_mode = GetOr(j, "serve_mode", b.serve_mode, kWhere);
  if (auto it = j.find("serve_persona"); it != j.end()) {
    b.serve_persona = PersonaFrom(*it, "bridge.serve_persona");
  }
  return b;
}

void ValidateAgent(const AgentConfig& a, const ExperimentConfig& c, std::string_view where) {
  if (a.kind == ProviderKind::kBridge && c.bridge.transport == BridgeTransportKind::kSubprocess &&
      c.bridge.command.empty()) {
    throw ConfigError(std::string(where) + " uses the bridge but bridge.command is empty");
  }
}

}  // namespace

void ExperimentConfig::Validate(Command command) const {
  try {
    game.Validate();
    opponent_model.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
  bon.Validate();
  theory.Validate();
  if (run.episodes < 1) throw ConfigError("run.episodes must be >= 1");
  if (run.seeds.empty()) throw ConfigError("run.seeds must be nonempty");
  if (std::set<std::uint64_t>(run.seeds.begin(), run.seeds.end()).size() != run.seeds.size()) {
    throw ConfigError("run.seeds must be distinct");
  }
  if (run.jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (run.output_dir.empty()) throw ConfigError("run.output_dir must be nonempty");
  if (run.run_id.find('/') != std::string::npos || run.run_id == "." || run.run_id == "..") {
    throw ConfigError("run.run_id must be a plain directory name");
  }
  if (bridge.timeout_ms < 1) throw ConfigError("bridge.timeout_ms must be >= 1");
  if (bridge.retries < 0) throw ConfigError("bridge.retries must be >= 0");
  if (bridge.port < 0 || bridge.port > 65535) throw ConfigError("bridge.port out of range");

  switch (command) {
    case Command::kRunFtpl:
      if (sfp.actions < 1) throw ConfigError("sfp.actions must be >= 1");
      if (sfp.schedules.empty()) throw ConfigError("sfp.schedules must be nonempty");
      for (const auto& s : sfp.schedules) {
        if (s != "adversarial" && s != "stationary" && s != "round_robin") {
          throw ConfigError("unknown sfp schedule \"" + s + "\"");
        }
      }
      if (sfp.horizons.empty()) throw ConfigError("sfp.horizons must be nonempty");
      for (auto h : sfp.horizons) {
        if (h < 1) throw ConfigError("sfp.horizons must be positive");
      }
      break;
    case Command::kRunMatrix:
      if (matrix.personas.size() < 2) {
        throw ConfigError("run-matrix needs at least two personas");
      }
      break;
    case Command::kRunBon:
      if (!agent1) throw ConfigError("run-bon needs an agents.agent1 section");
      if (!opponent) throw ConfigError("run-bon needs an agents.opponent section");
      if (agent1->kind != ProviderKind::kBon) {
        throw ConfigError("run-bon needs agents.agent1.kind = \"bon\"");
      }
      ValidateAgent(*agent1, *this, "agents.agent1");
      ValidateAgent(*opponent, *this, "agents.opponent");
      break;
    case Command::kVerifyTheory:
      break;
    case Command::kServeBridge:
      if (bridge.serve_mode != "stdio" && bridge.serve_mode != "http") {
        throw ConfigError("bridge.serve_mode must be \"stdio\" or \"http\"");
      }
      break;
  }
}

std::string ExperimentConfig::RunId(Command command) const {
  if (!run.run_id.empty()) return run.run_id;
  const std::uint64_t seed = command == Command::kVerifyTheory ? theory.seed : run.seeds.front();
  return std::string(CommandName(command)) + "-s" + std::to_string(seed);
}

ExperimentConfig ExperimentConfigFromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  CheckKeys(j, {"game", "agents", "bon", "opponent_model", "sfp", "run", "matrix", "theory",
                "bridge"},
            "config");
  ExperimentConfig c;
  if (auto it = j.find("game"); it != j.end()) c.game = GameSpecFromJson(*it);
  if (auto it = j.find("agents"); it != j.end()) {
    CheckKeys(*it, {"agent1", "opponent"}, "agents");
    if (auto a = it->find("agent1"); a != it->end()) c.agent1 = AgentFromJson(*a, "agents.agent1");
    if (auto a = it->find("opponent"); a != it->end()) {
      c.opponent = AgentFromJson(*a, "agents.opponent");
    }
  }
  if (auto it = j.find("bon"); it != j.end()) c.bon = BoNConfigFromJson(*it);
  if (auto it = j.find("opponent_model"); it != j.end()) {
    c.opponent_model = BucketConfigFromJson(*it);
  }
  if (auto it = j.find("sfp"); it != j.end()) c.sfp = SfpFromJson(*it);
  if (auto it = j.find("run"); it != j.end()) c.run = RunFromJson(*it);
  if (auto it = j.find("matrix"); it != j.end()) c.matrix = MatrixFromJson(*it);
  if (auto it = j.find("theory"); it != j.end()) c.theory = TheorySettingsFromJson(*it);
  if (auto it = j.find("bridge"); it != j.end()) c.bridge = BridgeFromJson(*it);
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

Json ToJson(const ExperimentConfig& c) {
  Json agents = Json::object();
  if (c.agent1) agents["agent1"] = AgentToJson(*c.agent1);
  if (c.opponent) agents["opponent"] = AgentToJson(*c.opponent);
  return {{"game", ToJson(c.game)},
          {"agents", agents},
          {"bon", ToJson(c.bon)},
          {"opponent_model", ToJson(c.opponent_model)},
          {"sfp", SfpToJson(c.sfp)},
          {"run", RunToJson(c.run)},
          {"matrix", MatrixToJson(c.matrix)},
          {"theory", ToJson(c.theory)},
          {"bridge", BridgeToJson(c.bridge)}};
}

}  // namespace repgame
