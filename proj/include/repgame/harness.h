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

// Experiment commands. Each validates the config, runs, and writes
// <output_dir>/<run_id>/{config.json, trajectories.jsonl, matchlog.json,
// metrics/*.csv, reports/*.json}. Files are staged in memory and written
// only when the run finishes, each through write-then-rename.

#ifndef REPGAME_HARNESS_H_
#define REPGAME_HARNESS_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "repgame/config.h"
#include "repgame/policy.h"
#include "repgame/serialize.h"

namespace repgame {

// Relative path -> file body.
class OutputSet {
 public:
  void Add(const std::string& relative, std::string body);
  const std::map<std::string, std::string>& files() const { return files_; }
  // Writes every file below `dir`.
  void Commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

struct CommandResult {
  std::filesystem::path run_dir;
  bool pass = true;
  Json summary;
  OutputSet outputs;
};

// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown
// after every worker stops.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn);

std::unique_ptr<PolicyProvider> MakeProvider(const AgentConfig& agent,
                                             const ExperimentConfig& config);
std::string ProviderLabel(const AgentConfig& agent);

CommandResult RunFtpl(const ExperimentConfig& config);
CommandResult RunMatrixCommand(const ExperimentConfig& config);
CommandResult RunBon(const ExperimentConfig& config);
// pass is false when any sweep fails.
CommandResult VerifyTheory(const ExperimentConfig& config);

// Validates, runs and commits the outputs. serve-bridge is not handled here.
CommandResult RunCommand(Command command, const ExperimentConfig& config);

// Answers bridge requests with the configured persona until end of input
// (stdio) or forever (http). Returns the process exit status.
int ServeBridge(const ExperimentConfig& config, std::istream& in, std::ostream& out,
                std::ostream& log);

}  // namespace repgame

#endif  // REPGAME_HARNESS_H_
