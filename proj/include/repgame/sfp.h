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

// Smooth fictitious play on two-player normal-form games. Agent 1 forms the
// empirical belief over the opponent's past actions and plays the perturbed
// best response to it with noise scale eta_t = scale / sqrt(t). Because the
// belief is the running mean of the reward columns, this is the same
// pathwise process as follow-the-perturbed-leader on cumulative rewards.

#ifndef REPGAME_SFP_H_
#define REPGAME_SFP_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repgame/rng.h"

namespace repgame::sfp {

// Row player is agent 1 (actions A), column player is agent 2 (actions B).
class NormalFormGame {
 public:
  NormalFormGame() = default;
  // Throws InvalidArgument unless both matrices are rectangular, nonempty,
  // of equal shape and with every entry in [0, 1].
  NormalFormGame(std::vector<std::vector<double>> reward_1,
                 std::vector<std::vector<double>> reward_2);

  int rows() const { return static_cast<int>(reward_1_.size()); }
  int cols() const { return reward_1_.empty() ? 0 : static_cast<int>(reward_1_[0].size()); }

  double r1(int a, int b) const { return reward_1_[a][b]; }
  double r2(int a, int b) const { return reward_2_[a][b]; }

  const std::vector<std::vector<double>>& reward_1() const { return reward_1_; }
  const std::vector<std::vector<double>>& reward_2() const { return reward_2_; }

  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  // Entries i.i.d. uniform on [0, 1].
  static NormalFormGame Random(int rows, int cols, Rng& rng);
  static NormalFormGame MatchingPennies();

 private:
  std::vector<std::vector<double>> reward_1_;
  std::vector<std::vector<double>> reward_2_;
};

// {"reward_1": [[...]], "reward_2": [[...]]}, optional "row_labels" and
// "col_labels".
NormalFormGame GameFromJson(std::string_view text);
NormalFormGame LoadGame(const std::string& path);
std::string GameToJson(const NormalFormGame& game);

class MixedStrategy {
 public:
  // Throws InvalidArgument on negative entries or a sum off 1 by > 1e-9.
  explicit MixedStrategy(std::vector<double> probabilities);
  static MixedStrategy Uniform(int n);

  const std::vector<double>& probabilities() const { return probs_; }
  double operator[](int i) const { return probs_[i]; }
  int size() const { return static_cast<int>(probs_.size()); }

 private:
  std::vector<double> probs_;
};

enum class NoiseKind { kGaussian, kLaplace, kGumbel };

std::string_view NoiseKindName(NoiseKind k);
NoiseKind ParseNoiseKind(std::string_view name);

struct FTPLConfig {
  NoiseKind noise_kind = NoiseKind::kGaussian;
  double eta_scale = 1.0;
  int monte_carlo_draws = 1000;

  void Validate() const;
  bool operator==(const FTPLConfig&) const = default;
};

// Standard (unit-scale) draw of the configured noise family.
double DrawNoise(NoiseKind kind, Rng& rng);
std::vector<double> DrawNoiseVector(NoiseKind kind, int n, Rng& rng);

// Empirical frequency of the opponent's past actions; uniform when empty.
// Throws InvalidArgument for action_count < 1 or an index out of range.
MixedStrategy FormBelief(std::span<const int> opponent_action_history,
                         int action_count);

std::vector<double> ExpectedRewards(const NormalFormGame& game,
                                    const MixedStrategy& belief);

// argmax_a E_{b~belief}[r1(a, b)] + eta * noise(a); smallest index on ties.
int PerturbedBestResponse(const NormalFormGame& game,
                          const MixedStrategy& belief, double eta,
                          std::span<const double> noise_draw);
// Same argmax over precomputed expected rewards.
int PerturbedArgmax(std::span<const double> expected, double eta,
                    std::span<const double> noise_draw);

// scale / sqrt(t). Throws InvalidArgument for t < 1 or scale <= 0.
double EtaSchedule(std::int64_t t, double scale);

// Monte-Carlo estimate of the distribution induced by the perturbation;
// diagnostics only.
MixedStrategy EstimateInducedDistribution(const NormalFormGame& game,
                                          const MixedStrategy& belief,
                                          double eta, const FTPLConfig& config,
                                          Rng& rng);

struct EpisodeRecord {
  int action_1 = 0;
  int action_2 = 0;
  double reward_1 = 0.0;
  double cumulative_regret = 0.0;
};

struct PlayTrace {
  std::vector<EpisodeRecord> records;
  // Sum over episodes of the reward column r1(., b^t).
  std::vector<double> cumulative_reward;
  double realized_reward = 0.0;
};

// What the opponent sees when choosing episode t's action: the episode index
// and all earlier joint actions.
struct OpponentView {
  std::int64_t t = 1;
  std::span<const int> agent_history;
  std::span<const int> opponent_history;
  std::span<const double> cumulative_reward;
};

// Opponent behaviour over episodes. It returns the opponent's action for
// episode t and may use its own random stream.
using OpponentSchedule = std::function<int(const OpponentView&, Rng&)>;

OpponentSchedule FixedSequence(std::vector<int> actions);
OpponentSchedule Stationary(MixedStrategy strategy);
// Plays the column that minimizes the reward of agent 1's current
// unperturbed leader; ties by smallest index.
OpponentSchedule AdversarialToLeader(const NormalFormGame& game);
// Cycles through the columns.
OpponentSchedule RoundRobin(int cols);

// Plays T episodes. Episode t forms the belief from episodes 1..t-1, draws one
// noise vector and plays the perturbed best response with eta_schedule(t).
PlayTrace RunSfpEpisodes(const NormalFormGame& game,
                         const OpponentSchedule& opponent, std::int64_t episodes,
                         const FTPLConfig& config, std::uint64_t seed);

// max_a sum_t r1(a, b^t) - sum_t r1(a^t, b^t). Throws on an empty trace.
double ExternalRegret(const PlayTrace& trace, const NormalFormGame& game);

// episode,action_1,action_2,reward_1,cumulative_regret
void WriteTraceCsv(const PlayTrace& trace, std::ostream& out);

}  // namespace repgame::sfp

#endif  // REPGAME_SFP_H_
