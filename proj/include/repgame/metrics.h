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

// Statistics over match logs: pairwise provider matrices, early/late window
// correlation, selection accuracy of Best-of-N against an exact opponent,
// candidate dispersion and social welfare.

#ifndef REPGAME_METRICS_H_
#define REPGAME_METRICS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "repgame/bon.h"
#include "repgame/match.h"
#include "repgame/oracle.h"

namespace repgame {

struct ProviderFactory {
  std::string label;
  std::function<std::unique_ptr<PolicyProvider>()> make;
};

// Seat of the row provider and which seat opens the episode.
struct RoleSetting {
  Agent row_seat = Agent::kOne;
  Agent starter = Agent::kOne;
  std::string Label() const;
};

std::vector<RoleSetting> AllRoleSettings();

using Matrix = std::vector<std::vector<double>>;

struct PairwiseMatrix {
  std::vector<std::string> labels;
  std::vector<RoleSetting> settings;
  // per_setting[s][row][col]: mean normalized reward of the row provider.
  std::vector<Matrix> per_setting;
  // Mean over the settings.
  Matrix combined;
  std::optional<int> dominant_row;
};

// A row that is >= every other row in every column (within `tolerance`).
std::optional<int> DominantRow(const Matrix& m, double tolerance = 1e-12);

// Plays every (row, column, setting, seed) match for `episodes` episodes.
// Cells run on up to `jobs` threads; results do not depend on `jobs`. When
// `logs` is given it receives every match log in (setting, row, col, seed)
// order. Throws InvalidArgument with fewer than two providers.
PairwiseMatrix ComputePairwiseMatrix(const std::vector<ProviderFactory>& providers,
                                     const GameSpec& spec, int episodes,
                                     const std::vector<std::uint64_t>& seeds,
                                     int jobs = 1,
                                     std::vector<MatchLog>* logs = nullptr);

// Pearson coefficient. Throws UndefinedStatistic for fewer than two points,
// mismatched lengths or zero variance in either series.
double Pearson(std::span<const double> x, std::span<const double> y);

// Correlation over logs of (mean normalized reward of `seat` in the first k
// episodes, same in the last k). Throws UndefinedStatistic for fewer than
// two logs and InvalidArgument for a log shorter than 2k.
double WindowCorrelation(const std::vector<MatchLog>& logs, int k, Agent seat);

struct AccuracyWindow {
  int first_episode = 1;
  int last_episode = 1;
  int decisions = 0;
  int correct = 0;
  // Absent when the window holds no decision.
  std::optional<double> accuracy;
};

// For every recorded Best-of-N decision, recomputes the exact value of each
// candidate when the rest of the episode is played by (base, oracle
// opponent). A decision is correct when its chosen candidate attains the
// maximum (within 1e-9). Throws InvalidArgument when the log has no
// decisions and AbstractionTooLarge when a continuation exceeds `max_nodes`.
std::vector<AccuracyWindow> SelectionAccuracy(
    const MatchLog& log, const PolicyProvider& base,
    const PolicyProvider& oracle_opponent,
    const std::vector<std::pair<int, int>>& windows,
    std::int64_t max_nodes = kDefaultNodeCap);

// Population standard deviation; absent for an empty input.
std::optional<double> PopulationStd(std::span<const double> values);

// Standard deviation of the offered prices (buyer-seller) or of agent 1's
// value of the offered transfers (exchange). Non-offer candidates are
// ignored; absent when nothing was offered.
std::optional<double> ProposalDispersion(const CandidateSet& set, const GameSpec& spec);

// r1 + r2 (net-change rewards, endowments dropped).
double SocialWelfare(const RewardPair& rewards);
double SocialWelfare(const EpisodeRecord& episode);

// Lower (1 - confidence) percentile of `resamples` bootstrap means.
double BootstrapMeanLowerBound(std::span<const double> values, double confidence,
                               int resamples, std::uint64_t seed);

// Mean normalized reward of `seat` over episodes [first, last] (1-based,
// inclusive).
double MeanNormalizedReward(const MatchLog& log, Agent seat, int first, int last);

// CSV with a "row" column of labels followed by one column per label.
void WriteMatrixCsv(const std::vector<std::string>& labels, const Matrix& m,
                    std::ostream& out);

}  // namespace repgame

#endif  // REPGAME_METRICS_H_
