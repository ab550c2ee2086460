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

// Randomized verification sweeps over small abstractions: the value error
// bound for imperfect opponent models, the adversarial-message bound, the
// policy-improvement property of exact Best-of-N, the no-regret rate of
// smooth fictitious play and the r1_max programs.

#ifndef REPGAME_THEORY_H_
#define REPGAME_THEORY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "repgame/oracle.h"
#include "repgame/serialize.h"

namespace repgame {

struct AbstractionLimits {
  int max_horizon = 6;
  int max_grid = 8;
  int max_alphabet = 4;
  // Upper bound on the estimated size of the full trajectory tree; larger
  // draws are resampled.
  std::int64_t max_tree = 300'000;
  bool operator==(const AbstractionLimits&) const = default;
};

// Buyer-seller game with a random price grid inside [cost, budget] (so
// normalized rewards lie in [0, 1]), random horizon, starter, seller seat
// and alphabet within the limits.
GameSpec RandomSmallSpec(Rng& rng, const AbstractionLimits& limits,
                         int opponent_branching);

// Estimated node count of the trajectory tree when agent 1 branches over
// every legal action and agent 2 over `opponent_branching` actions.
double EstimateTreeSize(const GameSpec& spec, int opponent_branching);

struct TheorySettings {
  std::uint64_t seed = 7;
  int theorem1_instances = 200;
  int prop1_instances = 50;
  int pi_instances = 50;
  AbstractionLimits theorem1_limits{};
  AbstractionLimits pi_limits{4, 3, 2, 20'000};
  int pi_max_level = 3;
  std::int64_t max_nodes = kDefaultNodeCap;

  // Regret-rate sweep.
  int ftpl_actions = 5;
  int ftpl_seeds = 20;
  std::vector<std::int64_t> ftpl_horizons{100, 1000, 10000};
  double ftpl_rate_constant = 1.0;

  void Validate() const;
  bool operator==(const TheorySettings&) const = default;
};

Json ToJson(const TheorySettings& s);
TheorySettings TheorySettingsFromJson(const Json& j);

std::vector<Theorem1Report> SweepTheorem1(const TheorySettings& settings);
std::vector<Prop1Report> SweepProp1(const TheorySettings& settings);

struct PolicyImprovementReport {
  std::string instance_id;
  double base_value = 0.0;
  // sharpened[l - 1] is the value of level l.
  std::vector<double> sharpened;
  double optimum = 0.0;
  int planner_turns = 0;
  bool improvement_pass = true;
  bool monotone_pass = true;
  bool optimum_pass = true;
  bool pass = true;
};

// Exact-mode Best-of-N over the full support of a random base policy,
// against a fixed random opponent model, for levels 1..pi_max_level.
std::vector<PolicyImprovementReport> SweepPolicyImprovement(
    const TheorySettings& settings);

struct RegretCell {
  std::string schedule;
  std::int64_t horizon = 0;
  double mean_regret = 0.0;
  double mean_regret_per_t = 0.0;
  // mean of Regret(T) / sqrt(T ln |A|)
  double mean_rate = 0.0;
};

struct RegretRateReport {
  std::vector<RegretCell> cells;
  double constant = 0.0;
  bool decreasing_pass = true;
  bool rate_pass = true;
  bool pass = true;
};

// Random games with entries in [0, 1]; "adversarial" plays against the
// learner's current leader, "stationary" a random fixed mixed strategy.
RegretRateReport SweepRegretRate(const TheorySettings& settings,
                                 const sfp::FTPLConfig& config);

struct R1MaxCase {
  std::string name;
  R1Max primary;
  R1Max cross_check;
  double expected = 0.0;
  int expected_dx = 0;
  int expected_dy = 0;
  bool check_transfer = false;
  bool pass = true;
};

// The reference buyer-seller instance and the exchange instance enumerated
// over dx in [-25, 25], dy in [-5, 5].
std::vector<R1MaxCase> CheckR1Max();

Json ToJson(const Theorem1Report& r);
Json ToJson(const Prop1Report& r);
Json ToJson(const PolicyImprovementReport& r);
Json ToJson(const RegretRateReport& r);
Json ToJson(const R1MaxCase& c);

}  // namespace repgame

#endif  // REPGAME_THEORY_H_
