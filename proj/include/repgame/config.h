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

// The experiment document: one JSON object with game, agents, bon,
// opponent_model, sfp, run, matrix, theory and bridge sections. Every section
// is optional and missing fields keep their defaults.

#ifndef REPGAME_CONFIG_H_
#define REPGAME_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repgame/bon.h"
#include "repgame/negotiation.h"
#include "repgame/opponent_model.h"
#include "repgame/persona.h"
#include "repgame/serialize.h"
#include "repgame/sfp.h"
#include "repgame/theory.h"

namespace repgame {

enum class Command { kRunFtpl, kRunMatrix, kRunBon, kVerifyTheory, kServeBridge };

std::string_view CommandName(Command c);
Command ParseCommand(std::string_view name);

enum class ProviderKind { kPersona, kBon, kBridge, kUniform };

std::string_view ProviderKindName(ProviderKind k);
ProviderKind ParseProviderKind(std::string_view name);

struct AgentConfig {
  ProviderKind kind = ProviderKind::kPersona;
  // The persona itself, or the base policy of a Best-of-N agent.
  PersonaParams persona;
  // Empty derives a label from the kind and family.
  std::string name;
  bool operator==(const AgentConfig&) const = default;
};

struct SfpSection {
  sfp::FTPLConfig ftpl;
  // JSON game file; empty draws a random game per seed.
  std::string game_path;
  int actions = 5;
  std::vector<std::string> schedules{"adversarial", "stationary"};
  std::vector<std::int64_t> horizons{100, 1000, 10000};
  bool operator==(const SfpSection&) const = default;
};

struct RunSection {
  int episodes = 20;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string output_dir = "out";
  // Empty gives "<command>-s<first seed>".
  std::string run_id;
  int jobs = 1;
  bool write_trajectories = true;
  bool operator==(const RunSection&) const = default;
};

// Default parameters of every persona family, in family order.
std::vector<PersonaParams> AllPersonaDefaults();

struct MatrixSection {
  std::vector<PersonaParams> personas = AllPersonaDefaults();
  bool operator==(const MatrixSection&) const = default;
};

enum class BridgeTransportKind { kSubprocess, kHttp };

struct BridgeSection {
  BridgeTransportKind transport = BridgeTransportKind::kSubprocess;
  std::vector<std::string> command;
  std::string host = "127.0.0.1";
  int port = 8765;
  int timeout_ms = 5000;
  int retries = 2;
  std::string template_id = "act";
  std::string persona_template;
  // Prompt template directory; empty selects the one shipped with the build.
  std::string assets_dir;
  // serve-bridge: "stdio" or "http", answering with `serve_persona`.
  std::string serve_mode = "stdio";
  PersonaParams serve_persona;
  bool operator==(const BridgeSection&) const = default;
};

struct ExperimentConfig {
  GameSpec game = GameSpec::BuyerSeller();
  std::optional<AgentConfig> agent1;
  std::optional<AgentConfig> opponent;
  BoNConfig bon;
  BucketConfig opponent_model;
  SfpSection sfp;
  RunSection run;
  MatrixSection matrix;
  TheorySettings theory;
  BridgeSection bridge;

  // Everything a command needs, checked before it starts. Throws ConfigError.
  void Validate(Command command) const;
  // "<command>-s<first seed>" unless run.run_id is set.
  std::string RunId(Command command) const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError on unknown keys, wrong types or invalid sections.
ExperimentConfig ExperimentConfigFromJson(const Json& j);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
Json ToJson(const ExperimentConfig& c);

std::filesystem::path DefaultAssetDir();

}  // namespace repgame

#endif  // REPGAME_CONFIG_H_
