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

#include "repgame/bon.h"

#include <algorithm>
#include <numeric>

#include "repgame/errors.h"
#include "repgame/persona.h"

namespace repgame {
namespace {

double PlannerReward(const GameSpec& spec, const EpisodeState& s, Agent planner) {
  return s.deal ? DealReward(spec, planner, *s.deal) : 0.0;
}

ActionDistribution RequireDistribution(const PolicyProvider& p,
                                       const DecisionPoint& point) {
  auto d = p.Distribution(point);
  if (!d) {
    throw InvalidArgument("provider '" + p.Name() +
                          "' exposes no distribution for exact evaluation");
  }
  return *d;
}

double ExpectedReturn(const GameSpec& spec, const Context& context, int episode,
                      const EpisodeState& s, Agent planner,
                      const PolicyProvider& base, const PolicyProvider& oppo,
                      SimulationBudget* budget) {
  if (budget) budget->Charge();
  if (s.terminal()) return PlannerReward(spec, s, planner);
  const DecisionPoint point{spec, context, s, WhoseTurn(s.h, spec.starter), episode};
  const PolicyProvider& mover = point.agent == planner ? base : oppo;
  ActionDistribution dist = RequireDistribution(mover, point);
  std::vector<double> terms;
  terms.reserve(dist.size());
  for (const auto& wa : dist) {
    if (wa.prob == 0.0) continue;
    terms.push_back(wa.prob * ExpectedReturn(spec, context, episode,
                                             ApplyAction(s, spec, wa.action),
                                             planner, base, oppo, budget));
  }
  return PairwiseSum(terms);
}

// Shared core of BonAct and the sharpened levels: `generator` proposes,
// `rollout` plays the planner inside simulations.
Action Decide(const BoNConfig& config, PolicyProvider& generator,
              PolicyProvider& rollout, PolicyProvider& oppo,
              const DecisionPoint& point, Rng& rng, CandidateSet* diagnostics,
              SimulationBudget* budget) {
  const std::uint64_t s = rng();
  Rng gen_rng = MakeRng({s, 0});
  CandidateSet set = GenerateCandidates(generator, config.generation, config.n,
                                        point, gen_rng, config.brainstorm_intensity);
  std::vector<double> estimates;
  for (std::size_t k = 0; k < set.candidates.size(); ++k) {
    Candidate& c = set.candidates[k];
    if (config.rollout_mode == RolloutMode::kExact) {
      c.samples = {ExactContinuationValue(point, c.action, rollout, oppo, budget)};
    } else {
      for (int r = 0; r < config.rollouts; ++r) {
        Rng rr = MakeRng({s, k + 1, static_cast<std::uint64_t>(r) + 1});
        c.samples.push_back(SimulateRollout(point, c.action, rollout, oppo, rr, budget));
      }
    }
    c.estimate = std::accumulate(c.samples.begin(), c.samples.end(), 0.0) /
                 static_cast<double>(c.samples.size());
    estimates.push_back(c.estimate);
  }
  set.chosen = SelectBest(estimates);
  Action chosen = set.candidates[set.chosen].action;
  if (diagnostics) *diagnostics = std::move(set);
  return chosen;
}

struct DepthGuard {
  explicit DepthGuard(int& d) : depth(d) { ++depth; }
  ~DepthGuard() { --depth; }
  int& depth;
};

}  // namespace

std::string_view GenerationModeName(GenerationMode m) {
  switch (m) {
    case GenerationMode::kIid: return "iid";
    case GenerationMode::kBrainstorm: return "brainstorm";
    case GenerationMode::kSupport: return "support";
  }
  return "iid";
}

GenerationMode ParseGenerationMode(std::string_view name) {
  for (GenerationMode m : {GenerationMode::kIid, GenerationMode::kBrainstorm,
                           GenerationMode::kSupport}) {
    if (GenerationModeName(m) == name) return m;
  }
  throw ConfigError("unknown generation mode: " + std::string(name));
}

std::string_view RolloutModeName(RolloutMode m) {
  return m == RolloutMode::kExact ? "exact" : "sampled";
}

RolloutMode ParseRolloutMode(std::string_view name) {
  if (name == "exact") return RolloutMode::kExact;
  if (name == "sampled") return RolloutMode::kSampled;
  throw ConfigError("unknown rollout mode: " + std::string(name));
}

void BoNConfig::Validate() const {
  if (n < 1) throw ConfigError("bon.n must be >= 1");
  if (rollouts < 1) throw ConfigError("bon.rollouts must be >= 1");
  if (level < 1) throw ConfigError("bon.level must be >= 1");
  if (generation == GenerationMode::kBrainstorm && n > kStrategyFamilyCount) {
    throw ConfigError("brainstorm generation supports at most " +
                      std::to_string(kStrategyFamilyCount) + " candidates");
  }
  if (!(brainstorm_intensity >= 0.0 && brainstorm_intensity <= 1.0)) {
    throw ConfigError("bon.brainstorm_intensity must lie in [0, 1]");
  }
  if (max_simulated_turns < 1) throw ConfigError("bon.max_simulated_turns must be >= 1");
}

void SimulationBudget::Charge(std::int64_t n) {
  used_ += n;
  if (used_ > cap_) {
    throw ResourceLimit("simulation budget of " + std::to_string(cap_) +
                        " turns exhausted");
  }
}

CandidateSet GenerateCandidates(PolicyProvider& base, GenerationMode mode,
                                int n, const DecisionPoint& point, Rng& rng,
                                double intensity) {
  if (n < 1) throw ConfigError("candidate count must be >= 1");
  CandidateSet set;
  switch (mode) {
    case GenerationMode::kIid:
      for (int k = 0; k < n; ++k) {
        Rng sub = MakeRng({rng(), static_cast<std::uint64_t>(k)});
        set.candidates.push_back({base.Act(point, sub), "iid", 0.0, {}});
      }
      break;
    case GenerationMode::kBrainstorm: {
      if (n > kStrategyFamilyCount) {
        throw ConfigError("brainstorm generation supports at most " +
                          std::to_string(kStrategyFamilyCount) + " candidates");
      }
      const Action seed_action = base.Act(point, rng);
      const auto families = AllStrategyFamilies();
      for (int k = 0; k < n; ++k) {
        set.candidates.push_back(
            {ApplyStrategy(families[k], seed_action, point, intensity),
             std::string(StrategyFamilyName(families[k])), 0.0, {}});
      }
      break;
    }
    case GenerationMode::kSupport:
      for (const auto& wa : RequireDistribution(base, point)) {
        if (wa.prob > 0.0) set.candidates.push_back({wa.action, "support", 0.0, {}});
      }
      break;
  }
  return set;
}

double SimulateRollout(const DecisionPoint& point, const Action& candidate,
                       PolicyProvider& base, PolicyProvider& oppo, Rng& rng,
                       SimulationBudget* budget) {
  const GameSpec& spec = point.spec;
  const Agent planner = point.agent;
  EpisodeState s = ApplyAction(point.state, spec, candidate);
  if (budget) budget->Charge();
  while (!s.terminal()) {
    const DecisionPoint p{spec, point.context, s, WhoseTurn(s.h, spec.starter),
                          point.episode};
    PolicyProvider& mover = p.agent == planner ? base : oppo;
    s = ApplyAction(s, spec, mover.Act(p, rng));
    if (budget) budget->Charge();
  }
  return PlannerReward(spec, s, planner);
}

double ExactContinuationValue(const DecisionPoint& point, const Action& candidate,
                              const PolicyProvider& base,
                              const PolicyProvider& oppo,
                              SimulationBudget* budget) {
  return ExpectedReturn(point.spec, point.context, point.episode,
                        ApplyAction(point.state, point.spec, candidate),
                        point.agent, base, oppo, budget);
}

int SelectBest(std::span<const double> estimates) {
  if (estimates.empty()) throw InvalidArgument("no candidates to select from");
  int best = 0;
  for (std::size_t k = 1; k < estimates.size(); ++k) {
    if (estimates[k] > estimates[best]) best = static_cast<int>(k);
  }
  return best;
}

Action BonAct(const BoNConfig& config, PolicyProvider& base, PolicyProvider& oppo,
              const DecisionPoint& point, Rng& rng, CandidateSet* diagnostics,
              SimulationBudget* budget) {
  config.Validate();
  return Decide(config, base, base, oppo, point, rng, diagnostics, budget);
}

SharpenedPolicy::SharpenedPolicy(std::shared_ptr<PolicyProvider> base,
                                 std::shared_ptr<PolicyProvider> oppo,
                                 BoNConfig config, std::uint64_t seed)
    : SharpenedPolicy(std::move(base), std::move(oppo), config, seed,
                      std::make_shared<SimulationBudget>(config.max_simulated_turns),
                      std::make_shared<int>(0)) {}

SharpenedPolicy::SharpenedPolicy(std::shared_ptr<PolicyProvider> base,
                                 std::shared_ptr<PolicyProvider> oppo,
                                 BoNConfig config, std::uint64_t seed,
                                 std::shared_ptr<SimulationBudget> budget,
                                 std::shared_ptr<int> depth)
    : base_(std::move(base)),
      oppo_(std::move(oppo)),
      config_(config),
      seed_(seed),
      budget_(std::move(budget)),
      depth_(std::move(depth)) {
  config_.Validate();
  if (!base_ || !oppo_) throw InvalidArgument("sharpening needs a base and an opponent");
  if (config_.level == 1) {
    lower_ = base_;
  } else {
    BoNConfig lower = config_;
    lower.level = config_.level - 1;
    lower_ = std::shared_ptr<SharpenedPolicy>(
        new SharpenedPolicy(base_, oppo_, lower, seed_, budget_, depth_));
  }
}

std::string SharpenedPolicy::Name() const {
  return "bon" + std::to_string(config_.level) + "(" + base_->Name() + ")";
}

Action SharpenedPolicy::Decide(const DecisionPoint& point, Rng& rng,
                               CandidateSet* diag) const {
  if (*depth_ == 0) budget_->Reset();
  DepthGuard guard(*depth_);
  return repgame::Decide(config_, *base_, *lower_, *oppo_, point, rng, diag,
                         budget_.get());
}

Action SharpenedPolicy::Act(const DecisionPoint& point, Rng& rng) {
  if (config_.rollout_mode == RolloutMode::kExact) {
    Action a = (*Distribution(point))[0].action;
    return a;
  }
  return Decide(point, rng, *depth_ == 0 ? &last_ : nullptr);
}

std::optional<ActionDistribution> SharpenedPolicy::Distribution(
    const DecisionPoint& point) const {
  if (config_.rollout_mode != RolloutMode::kExact) return std::nullopt;
  const std::string key = std::to_string(point.episode) + "/" +
                          std::to_string(point.context.size()) + "/" +
                          TrajectoryKey(point.state.trajectory);
  auto it = memo_.find(key);
  if (it == memo_.end()) {
    Rng rng = MakeRng({seed_, static_cast<std::uint64_t>(config_.level), Fnv1a(key)});
    CandidateSet set;
    Action a = Decide(point, rng, &set);
    if (*depth_ == 0) const_cast<SharpenedPolicy*>(this)->last_ = std::move(set);
    it = memo_.emplace(key, a).first;
  }
  return ActionDistribution{{it->second, 1.0}};
}

BoNAgent::BoNAgent(std::shared_ptr<PolicyProvider> base, BoNConfig config,
                   BucketConfig bucket, std::shared_ptr<PolicyProvider> fixed_oppo,
                   std::string name)
    : base_(std::move(base)),
      config_(config),
      bucket_(bucket),
      fixed_oppo_(std::move(fixed_oppo)),
      name_(std::move(name)) {
  config_.Validate();
  bucket_.Validate();
  if (!base_) throw InvalidArgument("BoN agent needs a base policy");
  if (name_.empty()) name_ = "bon(" + base_->Name() + ")";
}

Action BoNAgent::Act(const DecisionPoint& point, Rng& rng) {
  std::shared_ptr<PolicyProvider> oppo = fixed_oppo_;
  if (!oppo) {
    oppo = std::make_shared<OpponentModelPolicy>(std::make_shared<OpponentModel>(
        FitOpponentModel(point.spec, point.context, point.state.trajectory,
                         Other(point.agent), bucket_)));
  }
  BonDecision record{point.episode, point.state.h, point.agent,
                     point.state.trajectory, {}};
  Action a;
  if (config_.level == 1) {
    SimulationBudget budget(config_.max_simulated_turns);
    a = BonAct(config_, *base_, *oppo, point, rng, &record.set, &budget);
  } else {
    SharpenedPolicy sharpened(base_, oppo, config_, rng());
    a = sharpened.Act(point, rng);
    record.set = sharpened.last_decision();
  }
  pending_.push_back(std::move(record));
  return a;
}

std::vector<BonDecision> BoNAgent::TakeDiagnostics() {
  std::vector<BonDecision> out;
  out.swap(pending_);
  return out;
}

}  // namespace repgame
