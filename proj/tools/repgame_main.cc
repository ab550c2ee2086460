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

// repgame <command> --config <path> [--seed <u64>] [--out <dir>] [--jobs <n>]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "repgame/config.h"
#include "repgame/errors.h"
#include "repgame/harness.h"
#include "repgame/serialize.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

int Run(repgame::Command command, const Flags& flags) {
  repgame::ExperimentConfig config =
      flags.config.empty() ? repgame::ExperimentConfigFromJson(repgame::Json::object())
                           : repgame::LoadExperimentConfig(flags.config);
  if (flags.seed) {
    config.run.seeds = {*flags.seed};
    config.theory.seed = *flags.seed;
  }
  if (flags.out) config.run.output_dir = *flags.out;
  if (flags.jobs) config.run.jobs = *flags.jobs;

  if (command == repgame::Command::kServeBridge) {
    return repgame::ServeBridge(config, std::cin, std::cout, std::cerr);
  }
  const repgame::CommandResult result = repgame::RunCommand(command, config);
  std::cout << repgame::Dump(result.summary) << "\n";
  std::cerr << "wrote " << result.run_dir.string() << "\n";
  if (!result.pass) {
    std::cerr << repgame::CommandName(command) << ": assertions failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated negotiation experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (auto command : {repgame::Command::kRunFtpl, repgame::Command::kRunMatrix,
                       repgame::Command::kRunBon, repgame::Command::kVerifyTheory,
                       repgame::Command::kServeBridge}) {
    CLI::App* sub = app.add_subcommand(std::string(repgame::CommandName(command)));
    sub->add_option("--config", flags.config, "Experiment config (JSON)");
    sub->add_option("--seed", flags.seed, "Replace the seed list with this seed");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return Run(repgame::ParseCommand(name), flags);
  } catch (const repgame::ConfigError& e) {
    std::cerr << name << ": invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return 3;
  }
}
