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

#ifndef REPGAME_POLICY_H_
#define REPGAME_POLICY_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repgame/negotiation.h"
#include "repgame/rng.h"

namespace repgame {

struct WeightedAction {
  Action action;
  double prob = 0.0;
  bool operator==(const WeightedAction&) const = default;
};

using ActionDistribution = std::vector<WeightedAction>;

// Everything a policy may condition on: its private info (through `spec` and
// `agent`), the completed episodes, and the partial trajectory.
struct DecisionPoint {
  const GameSpec& spec;
  const Context& context;
  const EpisodeState& state;
  Agent agent;
  // 1-based index of the episode being played.
  int episode = 1;
};

// Makes a DecisionPoint for whoever moves at `state`.
DecisionPoint PointFor(const GameSpec& spec, const Context& context,
                       const EpisodeState& state, int episode = 1);

class PolicyProvider {
 public:
  virtual ~PolicyProvider() = default;

  virtual std::string Name() const = 0;

  // Must return an action legal at `point`.
  virtual Action Act(const DecisionPoint& point, Rng& rng) = 0;

  // Exact conditional action distribution, when the provider can expose one.
  virtual std::optional<ActionDistribution> Distribution(
      const DecisionPoint& point) const {
    (void)point;
    return std::nullopt;
  }
};

// Something that went wrong inside a provider without stopping the match,
// e.g. an external backend's response rejected and replaced.
struct Incident {
  int episode = 0;
  int h = 0;
  std::string provider;
  std::string detail;
  bool operator==(const Incident&) const = default;
};

// Providers that record incidents.
class IncidentSource {
 public:
  virtual ~IncidentSource() = default;
  // Incidents recorded since the previous call.
  virtual std::vector<Incident> TakeIncidents() = 0;
};

// A provider defined by its distribution; Act samples from it.
class DistributionPolicy : public PolicyProvider {
 public:
  Action Act(const DecisionPoint& point, Rng& rng) override;
  std::optional<ActionDistribution> Distribution(
      const DecisionPoint& point) const override {
    return Compute(point);
  }

 protected:
  virtual ActionDistribution Compute(const DecisionPoint& point) const = 0;
};

Action SampleAction(const ActionDistribution& dist, Rng& rng);

// Adds up duplicate actions, drops zero-probability entries and rescales to
// sum 1. Order of first appearance is kept.
ActionDistribution Canonicalize(ActionDistribution dist);

// Throws InvalidArgument unless every entry is legal at `point` and the
// probabilities are nonnegative and sum to 1 within `tolerance`.
void CheckDistribution(const ActionDistribution& dist,
                       const DecisionPoint& point, double tolerance = 1e-9);

// Uniform over LegalActions.
class UniformLegalPolicy : public DistributionPolicy {
 public:
  std::string Name() const override { return "uniform_legal"; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;
};

// Deterministic lookup from trajectory prefix to action. Unlisted decision
// points fall back to the first legal action.
class TablePolicy : public DistributionPolicy {
 public:
  explicit TablePolicy(std::string name) : name_(std::move(name)) {}

  void Set(const std::vector<Turn>& prefix, const Action& a);
  std::optional<Action> Lookup(const std::vector<Turn>& prefix) const;
  std::size_t size() const { return table_.size(); }

  std::string Name() const override { return name_; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  std::string name_;
  std::vector<std::pair<std::string, Action>> table_;  // sorted by key
};

// Pseudo-random tabular policy: at every decision point it mixes over a
// hash-selected subset of legal actions with hash-drawn weights. The
// distribution is a pure function of (seed, trajectory), so it is exact and
// reproducible. `support` <= 0 means full support.
class RandomTabularPolicy : public DistributionPolicy {
 public:
  RandomTabularPolicy(std::uint64_t seed, int support,
                      std::string name = "random_tabular");

  std::string Name() const override { return name_; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  std::uint64_t seed_;
  int support_;
  std::string name_;
};

// Pointwise mixture (1 - lambda(tau)) * base + lambda(tau) * noise where
// lambda(tau) is hash-drawn in [0, max_lambda].
class PerturbedPolicy : public DistributionPolicy {
 public:
  PerturbedPolicy(std::shared_ptr<const PolicyProvider> base,
                  std::shared_ptr<const PolicyProvider> noise,
                  double max_lambda, std::uint64_t seed);

  std::string Name() const override { return "perturbed(" + base_->Name() + ")"; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  std::shared_ptr<const PolicyProvider> base_;
  std::shared_ptr<const PolicyProvider> noise_;
  double max_lambda_;
  std::uint64_t seed_;
};

// Turn-independent provider that always plays a fixed action when legal and
// otherwise falls back to Wait. Handy for tests.
class ConstantPolicy : public DistributionPolicy {
 public:
  ConstantPolicy(Action action, std::string name = "constant")
      : action_(action), name_(std::move(name)) {}
  std::string Name() const override { return name_; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  Action action_;
  std::string name_;
};

}  // namespace repgame

#endif  // REPGAME_POLICY_H_
