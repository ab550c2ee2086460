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

// Best-of-N with opponent simulation. At its turn the planner draws N
// candidate actions from a base policy, scores each by simulating the rest of
// the episode with the base policy for itself and an opponent model for the
// other side, and plays the best-scoring candidate. Applying the procedure
// with the improved policy as the new base gives the higher-order variants.

#ifndef REPGAME_BON_H_
#define REPGAME_BON_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "repgame/negotiation.h"
#include "repgame/opponent_model.h"
#include "repgame/oracle.h"
#include "repgame/policy.h"

namespace repgame {

enum class GenerationMode {
  kIid,         // N independent base samples
  kBrainstorm,  // one rewrite of a base sample per strategy family
  kSupport,     // the whole support of the base distribution (N ignored)
};

enum class RolloutMode {
  kSampled,  // mean of M simulated episodes
  kExact,    // exact expectation by enumeration
};

std::string_view GenerationModeName(GenerationMode m);
GenerationMode ParseGenerationMode(std::string_view name);
std::string_view RolloutModeName(RolloutMode m);
RolloutMode ParseRolloutMode(std::string_view name);

struct BoNConfig {
  int n = 5;
  GenerationMode generation = GenerationMode::kIid;
  int rollouts = 3;
  int level = 1;
  RolloutMode rollout_mode = RolloutMode::kSampled;
  double brainstorm_intensity = 0.5;
  // Cap on simulated turns (sampled) or enumerated nodes (exact) per
  // top-level decision, summed over all levels.
  std::int64_t max_simulated_turns = 20'000'000;

  // Throws ConfigError.
  void Validate() const;
  bool operator==(const BoNConfig&) const = default;
};

struct Candidate {
  Action action;
  std::string family;
  double estimate = 0.0;
  std::vector<double> samples;
  bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
  std::vector<Candidate> candidates;
  int chosen = -1;
  bool operator==(const CandidateSet&) const = default;
};

// Counts simulated turns; throws ResourceLimit once `cap` is passed.
class SimulationBudget {
 public:
  explicit SimulationBudget(std::int64_t cap) : cap_(cap) {}
  void Charge(std::int64_t n = 1);
  std::int64_t used() const { return used_; }
  std::int64_t cap() const { return cap_; }
  void Reset() { used_ = 0; }

 private:
  std::int64_t cap_;
  std::int64_t used_ = 0;
};

// Candidates only (estimates unset). Throws ConfigError for brainstorm with
// n above the number of strategy families, and InvalidArgument for the
// support mode when the base exposes no distribution.
CandidateSet GenerateCandidates(PolicyProvider& base, GenerationMode mode,
                                int n, const DecisionPoint& point, Rng& rng,
                                double intensity = 0.5);

// Applies `candidate`, then plays `base` for the planner (point.agent) and
// `oppo` for the other side until the episode ends. Returns the planner's
// raw reward.
double SimulateRollout(const DecisionPoint& point, const Action& candidate,
                       PolicyProvider& base, PolicyProvider& oppo, Rng& rng,
                       SimulationBudget* budget = nullptr);

// Exact expected planner reward of playing `candidate` and then following
// (base, oppo). Both must expose distributions.
double ExactContinuationValue(const DecisionPoint& point, const Action& candidate,
                              const PolicyProvider& base,
                              const PolicyProvider& oppo,
                              SimulationBudget* budget = nullptr);

// Index of the first maximum. Throws InvalidArgument when empty.
int SelectBest(std::span<const double> estimates);

// One Best-of-N decision. With s one draw of `rng`, generation uses the
// stream derived from (s, 0) and rollout r of candidate k the stream derived
// from (s, k + 1, r + 1), so each rollout is reproducible on its own.
Action BonAct(const BoNConfig& config, PolicyProvider& base, PolicyProvider& oppo,
              const DecisionPoint& point, Rng& rng, CandidateSet* diagnostics = nullptr,
              SimulationBudget* budget = nullptr);

// The level-l policy: l = 0 is `base`; level l runs BonAct with level l - 1 as
// the rollout policy. Candidates always come from `base`, so the candidate
// pool does not collapse once a level becomes deterministic. In exact mode
// the policy is deterministic and exposes its point-mass distribution, with
// decisions memoized per decision point.
class SharpenedPolicy : public PolicyProvider {
 public:
  SharpenedPolicy(std::shared_ptr<PolicyProvider> base,
                  std::shared_ptr<PolicyProvider> oppo, BoNConfig config,
                  std::uint64_t seed = 0);

  int level() const { return config_.level; }
  std::string Name() const override;
  Action Act(const DecisionPoint& point, Rng& rng) override;
  std::optional<ActionDistribution> Distribution(
      const DecisionPoint& point) const override;

  const CandidateSet& last_decision() const { return last_; }
  std::int64_t last_cost() const { return budget_->used(); }

 private:
  SharpenedPolicy(std::shared_ptr<PolicyProvider> base,
                  std::shared_ptr<PolicyProvider> oppo, BoNConfig config,
                  std::uint64_t seed, std::shared_ptr<SimulationBudget> budget,
                  std::shared_ptr<int> depth);

  Action Decide(const DecisionPoint& point, Rng& rng, CandidateSet* diag) const;

  std::shared_ptr<PolicyProvider> base_;
  std::shared_ptr<PolicyProvider> oppo_;
  std::shared_ptr<PolicyProvider> lower_;
  BoNConfig config_;
  std::uint64_t seed_;
  std::shared_ptr<SimulationBudget> budget_;
  std::shared_ptr<int> depth_;
  mutable std::unordered_map<std::string, Action> memo_;
  CandidateSet last_;
};

// One recorded Best-of-N decision.
struct BonDecision {
  int episode = 0;
  int h = 0;
  Agent agent = Agent::kOne;
  std::vector<Turn> prefix;
  CandidateSet set;
  bool operator==(const BonDecision&) const = default;
};

// Providers that record per-decision diagnostics.
class DiagnosticsSource {
 public:
  virtual ~DiagnosticsSource() = default;
  // Decisions recorded since the previous call.
  virtual std::vector<BonDecision> TakeDiagnostics() = 0;
};

// Match-level Best-of-N agent. Unless a fixed opponent model is given, the
// model is refit at every decision from the context and the current partial
// trajectory.
class BoNAgent : public PolicyProvider, public DiagnosticsSource {
 public:
  BoNAgent(std::shared_ptr<PolicyProvider> base, BoNConfig config,
           BucketConfig bucket = {},
           std::shared_ptr<PolicyProvider> fixed_oppo = nullptr,
           std::string name = "");

  std::string Name() const override { return name_; }
  Action Act(const DecisionPoint& point, Rng& rng) override;
  std::vector<BonDecision> TakeDiagnostics() override;

  const BoNConfig& config() const { return config_; }

 private:
  std::shared_ptr<PolicyProvider> base_;
  BoNConfig config_;
  BucketConfig bucket_;
  std::shared_ptr<PolicyProvider> fixed_oppo_;
  std::string name_;
  std::vector<BonDecision> pending_;
};

}  // namespace repgame

#endif  // REPGAME_BON_H_
